#include "convexmix/signals.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "convexmix/errors.hpp"

namespace convexmix {

namespace {

constexpr const char* kKindNames[] = {"case1",      "case2",           "constant",   "alternating",
                                      "square_wave", "piecewise_switch", "custom_file"};

double parity_sign(std::size_t t) { return (t % 2 == 1) ? -1.0 : 1.0; }

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_real(const std::string& cell, std::size_t row) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc{} || ptr != last) throw ParseError("non-numeric cell '" + cell + "'", row);
  if (!std::isfinite(v)) throw ParseError("non-finite cell '" + cell + "'", row);
  return v;
}

}  // namespace

const char* to_string(SequenceKind kind) { return kKindNames[static_cast<int>(kind)]; }

SequenceKind parse_sequence_kind(const std::string& text) {
  for (int i = 0; i < 7; ++i) {
    if (text == kKindNames[i]) return static_cast<SequenceKind>(i);
  }
  throw DomainError("unknown sequence kind '" + text + "'");
}

SequenceSpec SequenceSpec::case1(std::size_t n, double y_bound) {
  SequenceSpec s;
  s.kind = SequenceKind::case1;
  s.n = n;
  s.y_bound = y_bound;
  return s;
}

SequenceSpec SequenceSpec::case2(std::size_t n, double y_bound) {
  SequenceSpec s;
  s.kind = SequenceKind::case2;
  s.n = n;
  s.y_bound = y_bound;
  return s;
}

SequenceSpec SequenceSpec::from_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open sequence spec", file.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("invalid sequence spec JSON in " + file.string() + ": " + e.what());
  }
  try {
    SequenceSpec s;
    s.kind = parse_sequence_kind(j.at("kind").get<std::string>());
    s.n = j.value("n", std::size_t{0});
    s.y_bound = j.at("y_bound").get<double>();
    s.level = j.value("level", 0.0);
    s.period = j.value("period", std::size_t{1});
    s.switch_points = j.value("switch_points", std::vector<std::size_t>{});
    if (j.contains("path")) {
      std::filesystem::path p = j["path"].get<std::string>();
      s.path = p.is_relative() ? file.parent_path() / p : p;
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("invalid sequence spec in " + file.string() + ": " + e.what());
  }
}

void SequenceSpec::validate() const {
  if (!(y_bound > 0.0) || !std::isfinite(y_bound)) throw DomainError("sequence spec: y_bound must be positive");
  if (kind == SequenceKind::custom_file) {
    if (path.empty()) throw DomainError("sequence spec: custom_file needs a path");
    return;
  }
  if (n == 0) throw DomainError("sequence spec: n must be at least 1");
  switch (kind) {
    case SequenceKind::case2:
      if (y_bound < 0.5) throw DomainError("sequence spec: case2 needs y_bound >= 0.5");
      break;
    case SequenceKind::constant:
    case SequenceKind::alternating:
    case SequenceKind::square_wave:
    case SequenceKind::piecewise_switch:
      if (!(std::abs(level) <= y_bound)) throw DomainError("sequence spec: |level| must not exceed y_bound");
      if (kind == SequenceKind::square_wave && period == 0) throw DomainError("sequence spec: period must be positive");
      break;
    default:
      break;
  }
}

std::vector<SignalSample> generate(const SequenceSpec& spec) {
  spec.validate();
  if (spec.kind == SequenceKind::custom_file) {
    throw DomainError("generate: custom_file sequences are loaded with load_csv/materialize");
  }
  std::vector<SignalSample> out;
  out.reserve(spec.n);
  const double Y = spec.y_bound;
  const double L = spec.level;
  bool swapped = false;
  std::size_t next_switch = 0;
  auto switches = spec.switch_points;
  std::sort(switches.begin(), switches.end());

  for (std::size_t t = 1; t <= spec.n; ++t) {
    const double sgn = parity_sign(t);
    switch (spec.kind) {
      case SequenceKind::case1:
        out.push_back({Y, Y, sgn * Y});
        break;
      case SequenceKind::case2:
        out.push_back({0.5, Y, sgn * 0.5});
        break;
      case SequenceKind::constant:
        out.push_back({L, L, L});
        break;
      case SequenceKind::alternating:
        out.push_back({sgn * L, sgn * L, -sgn * L});
        break;
      case SequenceKind::square_wave: {
        const double v = ((t - 1) / spec.period) % 2 == 0 ? -L : L;
        out.push_back({v, v, 0.0});
        break;
      }
      case SequenceKind::piecewise_switch: {
        while (next_switch < switches.size() && switches[next_switch] <= t) {
          swapped = !swapped;
          ++next_switch;
        }
        const double y = sgn * L;
        out.push_back(swapped ? SignalSample{y, -y, y} : SignalSample{y, y, -y});
        break;
      }
      case SequenceKind::custom_file:
        break;
    }
  }
  return out;
}

SignalSample clip_sample(SignalSample s, double y_bound, std::size_t& clip_count) {
  auto clip = [&](double& v) {
    if (v > y_bound) {
      v = y_bound;
      ++clip_count;
    } else if (v < -y_bound) {
      v = -y_bound;
      ++clip_count;
    }
  };
  clip(s.y);
  clip(s.yhat1);
  clip(s.yhat2);
  return s;
}

CsvTable read_csv_table(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open file", file.string());
  CsvTable table;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw ParseError("expected " + std::to_string(table.header.size()) + " columns, found " +
                           std::to_string(fields.size()),
                       row);
    }
    std::vector<double> values;
    values.reserve(fields.size());
    for (const auto& cell : fields) values.push_back(parse_real(cell, row));
    table.rows.push_back(std::move(values));
  }
  if (table.header.empty()) throw ParseError("empty file", 1);
  return table;
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ParseError("missing column '" + name + "'", 1);
  return static_cast<std::size_t>(it - header.begin());
}

LoadedSequence load_csv(const std::filesystem::path& file, double y_bound) {
  if (!(y_bound > 0.0)) throw DomainError("load_csv: y_bound must be positive");
  const auto table = read_csv_table(file);
  static const std::vector<std::string> plain{"y", "yhat1", "yhat2"};
  if (table.header != plain && table.header != trajectory_columns()) {
    std::string got;
    for (const auto& h : table.header) got += (got.empty() ? "" : ",") + h;
    throw ParseError("expected header y,yhat1,yhat2 but found " + got, 1);
  }
  if (table.rows.empty()) throw ParseError("no data rows", 2);
  const std::size_t iy = table.column("y"), i1 = table.column("yhat1"), i2 = table.column("yhat2");
  LoadedSequence out;
  out.samples.reserve(table.rows.size());
  for (const auto& r : table.rows) out.samples.push_back(clip_sample({r[iy], r[i1], r[i2]}, y_bound, out.clip_count));
  return out;
}

LoadedSequence materialize(const SequenceSpec& spec) {
  if (spec.kind == SequenceKind::custom_file) {
    spec.validate();
    auto loaded = load_csv(spec.path, spec.y_bound);
    if (spec.n != 0 && spec.n < loaded.samples.size()) loaded.samples.resize(spec.n);
    return loaded;
  }
  return LoadedSequence{generate(spec), 0};
}

const std::vector<std::string>& trajectory_columns() {
  static const std::vector<std::string> cols{
      "t",        "y",                "yhat1",            "yhat2",  "lambda",      "rho",
      "yhat",     "e",                "cum_loss",         "best_beta_prefix",      "best_loss_prefix",
      "regret",   "norm_regret",      "bound_norm",       "in_range", "projected"};
  return cols;
}

std::string format_real(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw NumericError("format_real: conversion failed");
  return std::string(buf, ptr);
}

void write_trajectory(std::span<const TrajectoryRow> rows, const std::filesystem::path& file) {
  if (rows.empty()) throw DomainError("write_trajectory: empty trajectory");
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write trajectory", file.string());
  const auto& cols = trajectory_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : rows) {
    out << r.t;
    for (double v : {r.y, r.yhat1, r.yhat2, r.lambda, r.rho, r.yhat, r.e, r.cum_loss, r.best_beta_prefix,
                     r.best_loss_prefix, r.regret, r.norm_regret, r.bound_norm}) {
      out << ',' << format_real(v);
    }
    out << ',' << (r.in_range ? 1 : 0) << ',' << (r.projected ? 1 : 0) << '\n';
  }
  out.flush();
  if (!out) throw IoError("write failed", file.string());
}

std::vector<TrajectoryRow> read_trajectory(const std::filesystem::path& file) {
  const auto table = read_csv_table(file);
  std::vector<std::size_t> idx;
  for (const auto& name : trajectory_columns()) idx.push_back(table.column(name));
  std::vector<TrajectoryRow> rows;
  rows.reserve(table.rows.size());
  for (const auto& v : table.rows) {
    TrajectoryRow r;
    r.t = static_cast<std::size_t>(v[idx[0]]);
    r.y = v[idx[1]];
    r.yhat1 = v[idx[2]];
    r.yhat2 = v[idx[3]];
    r.lambda = v[idx[4]];
    r.rho = v[idx[5]];
    r.yhat = v[idx[6]];
    r.e = v[idx[7]];
    r.cum_loss = v[idx[8]];
    r.best_beta_prefix = v[idx[9]];
    r.best_loss_prefix = v[idx[10]];
    r.regret = v[idx[11]];
    r.norm_regret = v[idx[12]];
    r.bound_norm = v[idx[13]];
    r.in_range = v[idx[14]] != 0.0;
    r.projected = v[idx[15]] != 0.0;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace convexmix
