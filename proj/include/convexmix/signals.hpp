#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "convexmix/mixture.hpp"

namespace convexmix {

enum class SequenceKind { case1, case2, constant, alternating, square_wave, piecewise_switch, custom_file };

const char* to_string(SequenceKind kind);
SequenceKind parse_sequence_kind(const std::string& text);

/// Parameters of a generated or file-backed sequence. Fields that a kind
/// does not use are ignored.
///   case1            y = Y, yhat1 = Y, yhat2 = (-1)^t Y
///   case2            y = 0.5, yhat1 = Y, yhat2 = (-1)^t 0.5   (needs Y >= 0.5)
///   constant         y = yhat1 = yhat2 = level
///   alternating      y = yhat1 = (-1)^t level, yhat2 = -y
///   square_wave      y = yhat1 = +-level in blocks of `period`, first block negative; yhat2 = 0
///   piecewise_switch y = (-1)^t level; one expert tracks y and the other
///                    predicts -y, roles swapping at each switch point
///   custom_file      samples loaded from `path`
struct SequenceSpec {
  SequenceKind kind = SequenceKind::case1;
  std::size_t n = 0;
  double y_bound = 0.0;
  double level = 0.0;
  std::size_t period = 1;
  std::vector<std::size_t> switch_points;  // 1-based indices where the experts swap
  std::filesystem::path path;

  static SequenceSpec case1(std::size_t n = 10000, double y_bound = 0.5);
  static SequenceSpec case2(std::size_t n = 10000, double y_bound = 0.54);
  /// Reads a JSON object whose keys mirror the field names.
  static SequenceSpec from_json_file(const std::filesystem::path& file);

  void validate() const;
};

std::vector<SignalSample> generate(const SequenceSpec& spec);

struct LoadedSequence {
  std::vector<SignalSample> samples;
  std::size_t clip_count = 0;
};

/// Clamps each field into [-y_bound, y_bound], adding the number of clamped fields to `clip_count`.
SignalSample clip_sample(SignalSample sample, double y_bound, std::size_t& clip_count);

/// Reads `y,yhat1,yhat2` rows (or the input-echo columns of a trajectory file) and clips them.
LoadedSequence load_csv(const std::filesystem::path& file, double y_bound);

/// generate() for synthetic kinds, load_csv() for custom_file.
LoadedSequence materialize(const SequenceSpec& spec);

struct TrajectoryRow {
  std::size_t t = 0;
  double y = 0.0;
  double yhat1 = 0.0;
  double yhat2 = 0.0;
  double lambda = 0.0;  // weight used for the prediction at t
  double rho = 0.0;
  double yhat = 0.0;
  double e = 0.0;
  double cum_loss = 0.0;
  double best_beta_prefix = 0.0;
  double best_loss_prefix = 0.0;
  double regret = 0.0;
  double norm_regret = 0.0;
  double bound_norm = 0.0;
  bool in_range = false;
  bool projected = false;
};

/// Header of the trajectory CSV, in column order.
const std::vector<std::string>& trajectory_columns();

void write_trajectory(std::span<const TrajectoryRow> rows, const std::filesystem::path& file);
std::vector<TrajectoryRow> read_trajectory(const std::filesystem::path& file);

/// Numeric CSV with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of `name` in the header; throws ParseError(row 1) when absent.
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv_table(const std::filesystem::path& file);

/// Shortest decimal that parses back to the same double, locale independent.
std::string format_real(double value);

}  // namespace convexmix
