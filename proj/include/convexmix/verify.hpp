#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace convexmix {

struct VerifyConfig {
  std::size_t trials = 100;
  std::size_t n = 500;
  std::uint64_t seed = 7;
  double eps = 0.1;
  double y_bound = 1.0;
  double lambda_plus = 0.08;
  std::optional<double> override_a;
  double tolerance = 1e-9;
  double oracle_resolution = 1e-3;
  std::size_t random_betas = 20;
};

struct VerifyFailure {
  std::string suite;
  std::size_t trial = 0;
  std::uint64_t seed = 0;  // rerun with --seed <seed> --trials 1 to reproduce
  std::size_t step = 0;    // 0 when not step-specific
  double beta = 0.0;
  double value = 0.0;
  std::string detail;
};

struct SuiteTally {
  std::string name;
  std::size_t checks = 0;
  std::size_t failures = 0;
};

struct VerifyReport {
  VerifyConfig config;
  std::vector<SuiteTally> suites;
  std::vector<VerifyFailure> failures;  // capped at kMaxRecordedFailures
  std::size_t total_failures = 0;
  std::size_t skipped_out_of_range = 0;
  double min_margin = 0.0;

  static constexpr std::size_t kMaxRecordedFailures = 200;

  bool passed() const noexcept { return total_failures == 0; }
  nlohmann::json to_json() const;
};

/// Property suites over seeded random sequences, monitor mode:
///   per_step_margin, form_equivalence, telescoping, oracle_agreement, constant_identities.
/// Trial k draws from a generator seeded with seed + k.
VerifyReport run_verification(const VerifyConfig& config);

}  // namespace convexmix
