#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "convexmix/mixture.hpp"
#include "convexmix/regret.hpp"
#include "convexmix/signals.hpp"

namespace convexmix {

/// Inequality tolerance for audits: 1e-9 unless CONVEXMIX_TOL overrides it.
double inequality_tolerance();

/// 1-based inclusive step interval.
struct Window {
  std::size_t first = 1;
  std::size_t last = 1;

  /// Parses "A:B".
  static Window parse(const std::string& text);
};

struct RunConfig {
  MixtureParams params;
  /// When set the learning rate is derived from eps and params.mu is ignored.
  std::optional<double> eps;
  double lambda_init = 0.5;
  std::optional<Window> window;
};

struct WindowSummary {
  Window window;
  double lambda_start = 0.5;
  double loss_alg = 0.0;
  double best_beta = 0.5;
  double loss_best = 0.0;
  bool best_beta_degenerate = false;
  double regret = 0.0;
  double bound_total = 0.0;
};

struct RunSummary {
  std::size_t n = 0;
  double mu = 0.0;
  double eps = 0.0;
  double lambda_plus = 0.0;
  double y_bound = 0.0;
  ConstraintMode mode = ConstraintMode::monitor;
  double lambda_init = 0.5;
  double final_lambda = 0.0;
  double loss_alg = 0.0;
  double best_beta = 0.0;
  bool best_beta_degenerate = false;
  double loss_best = 0.0;
  double regret_multiplier = 0.0;
  double regret = 0.0;
  double norm_regret = 0.0;
  double bound_total = 0.0;  // beta-free worst case
  double bound_normalized = 0.0;
  double bound_total_at_best_beta = 0.0;
  std::size_t out_of_range_steps = 0;
  std::size_t projected_steps = 0;
  std::size_t clip_count = 0;
  bool theorem_valid = false;  // no out-of-range step ran unprojected
  std::optional<WindowSummary> window;
};

nlohmann::json to_json(const RunSummary& s);

struct RunResult {
  TheoremConstants constants;
  std::vector<TrajectoryRow> rows;
  RunSummary summary;
};

/// Runs the combiner over the sequence and builds per-step prefix oracle,
/// regret, and bound curves.
RunResult run_experiment(const RunConfig& config, const LoadedSequence& sequence);

/// Regret over a window using the window's own best beta and the weight the
/// algorithm held when the window opened.
WindowSummary windowed_regret(std::span<const TrajectoryRow> rows, const TheoremConstants& constants, Window window);

}  // namespace convexmix
