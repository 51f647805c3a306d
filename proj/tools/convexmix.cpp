// convexmix: experiments and audits for the online convex two-expert combiner.
//
//   convexmix run          --case 1|2 | --input CSV | --spec JSON  [...]
//   convexmix verify       --trials N --n N --seed S [--eps E ...]
//   convexmix lemma-audit  --eps E | --a A --b B --mu M  [--budget N]
//   convexmix plot         --input TRAJECTORY.csv --out plot.svg [--logx]
//   convexmix sweep        --case 2 --mu-list 0.02,0.04,0.08 --out DIR
//
// Exit codes: 0 success, 1 verification failure / violations found,
// 2 usage or input error, 3 numeric failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "convexmix/errors.hpp"
#include "convexmix/experiment.hpp"
#include "convexmix/kernels.hpp"
#include "convexmix/lemma.hpp"
#include "convexmix/plot.hpp"
#include "convexmix/regret.hpp"
#include "convexmix/signals.hpp"
#include "convexmix/verify.hpp"

namespace fs = std::filesystem;
using namespace convexmix;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fills options the user did not pass on the command line from a JSON object
// whose keys mirror the long flag names ("lambda-plus" or "lambda_plus").
void apply_config(CLI::App& app, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config", path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("invalid config JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string key = it.key();
    std::replace(key.begin(), key.end(), '_', '-');
    CLI::Option* opt = nullptr;
    try {
      opt = app.get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw UsageError("unknown config key '" + it.key() + "'");
    }
    if (opt->count() > 0) continue;
    bool blocked = false;
    for (const CLI::Option* other : opt->get_excludes()) blocked = blocked || other->count() > 0;
    if (blocked) continue;
    const auto& v = it.value();
    if (v.is_boolean()) {
      if (v.get<bool>()) opt->add_result(std::string("true"));
    } else if (v.is_string()) {
      opt->add_result(v.get<std::string>());
    } else if (v.is_array()) {
      for (const auto& e : v) opt->add_result(e.is_string() ? e.get<std::string>() : e.dump());
    } else {
      opt->add_result(v.dump());
    }
    opt->run_callback();
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write", path.string());
  out << text;
  if (!out) throw IoError("write failed", path.string());
}

// ---------------------------------------------------------------- run / sweep

struct RunFlags {
  std::optional<int> case_id;
  std::string input;
  std::string spec;
  std::optional<std::size_t> n;
  std::optional<double> mu;
  std::optional<double> eps;
  std::optional<double> lambda_plus;
  std::optional<double> y_bound;
  std::optional<double> lambda_init;
  std::string mode = "project";
  std::string window;
  std::string out = "trajectory.csv";
  std::string summary = "summary.json";
  std::string config;
  std::vector<double> mu_list;
};

void add_run_options(CLI::App& cmd, RunFlags& f) {
  auto* c = cmd.add_option("--case", f.case_id, "Built-in experiment (1 or 2)")->check(CLI::IsMember({1, 2}));
  auto* i = cmd.add_option("--input", f.input, "CSV with header y,yhat1,yhat2");
  auto* s = cmd.add_option("--spec", f.spec, "JSON sequence spec");
  c->excludes(i)->excludes(s);
  i->excludes(s);
  cmd.add_option("--n", f.n, "Number of steps (truncates file input)")->check(CLI::PositiveNumber);
  auto* mu = cmd.add_option("--mu", f.mu, "Learning rate")->check(CLI::PositiveNumber);
  auto* eps = cmd.add_option("--eps", f.eps, "Derive mu from eps")->check(CLI::PositiveNumber);
  mu->excludes(eps);
  cmd.add_option("--lambda-plus", f.lambda_plus, "Constraint boundary in (0, 1/2)");
  cmd.add_option("--ybound", f.y_bound, "Signal bound Y")->check(CLI::PositiveNumber);
  cmd.add_option("--lambda-init", f.lambda_init, "Initial weight (default 1/2)");
  cmd.add_option("--mode", f.mode, "monitor or project")->check(CLI::IsMember({"monitor", "project"}));
  cmd.add_option("--window", f.window, "Windowed regret over steps A:B");
  cmd.add_option("--config", f.config, "JSON file with default flag values");
}

struct PreparedRun {
  RunConfig config;
  LoadedSequence sequence;
};

PreparedRun prepare_run(const RunFlags& f) {
  const int sources = (f.case_id ? 1 : 0) + (f.input.empty() ? 0 : 1) + (f.spec.empty() ? 0 : 1);
  if (sources != 1) throw UsageError("exactly one of --case, --input, --spec is required");

  PreparedRun p;
  auto& params = p.config.params;
  params.lambda_plus = f.lambda_plus.value_or(0.08);
  params.mode = parse_constraint_mode(f.mode);

  if (f.case_id) {
    const bool first = *f.case_id == 1;
    const double y_bound = f.y_bound.value_or(first ? 0.5 : 0.54);
    const std::size_t n = f.n.value_or(10000);
    p.sequence.samples = generate(first ? SequenceSpec::case1(n, y_bound) : SequenceSpec::case2(n, y_bound));
    params.y_bound = y_bound;
    params.mu = f.mu.value_or(first ? 0.08 : 0.04);
  } else {
    SequenceSpec spec;
    if (!f.spec.empty()) {
      spec = SequenceSpec::from_json_file(f.spec);
      if (f.y_bound) spec.y_bound = *f.y_bound;
      if (f.n) spec.n = *f.n;
    } else {
      if (!f.y_bound) throw UsageError("--input needs --ybound");
      spec.kind = SequenceKind::custom_file;
      spec.path = f.input;
      spec.y_bound = *f.y_bound;
      spec.n = f.n.value_or(0);
    }
    p.sequence = materialize(spec);
    params.y_bound = spec.y_bound;
    if (!f.mu && !f.eps) throw UsageError("--mu or --eps is required for --input/--spec runs");
    params.mu = f.mu.value_or(0.0);
  }
  p.config.eps = f.eps;
  if (f.eps) params.mu = 0.0;
  p.config.lambda_init = f.lambda_init.value_or(0.5);
  if (!f.window.empty()) p.config.window = Window::parse(f.window);
  return p;
}

void print_summary(const RunSummary& s) {
  std::printf("n=%zu mode=%s mu=%.6g eps=%.6g lambda_final=%.6f\n", s.n, to_string(s.mode), s.mu, s.eps,
              s.final_lambda);
  std::printf("L_alg=%.6f beta_o=%.6f L_best=%.6f regret=%.6f bound_total=%.6f (%s)\n", s.loss_alg, s.best_beta,
              s.loss_best, s.regret, s.bound_total, s.regret <= s.bound_total ? "within bound" : "EXCEEDS bound");
  std::printf("out_of_range=%zu projected=%zu clipped=%zu theorem_valid=%s\n", s.out_of_range_steps,
              s.projected_steps, s.clip_count, s.theorem_valid ? "true" : "false");
  if (s.window) {
    const auto& w = *s.window;
    std::printf("window %zu:%zu regret=%.6f beta=%.6f bound_total=%.6f\n", w.window.first, w.window.last, w.regret,
                w.best_beta, w.bound_total);
  }
}

int cmd_run(const RunFlags& f) {
  auto prepared = prepare_run(f);
  const auto result = run_experiment(prepared.config, prepared.sequence);
  write_trajectory(result.rows, f.out);
  write_text(f.summary, to_json(result.summary).dump(2) + "\n");
  print_summary(result.summary);
  return 0;
}

int cmd_sweep(const RunFlags& f) {
  if (f.mu_list.empty()) throw UsageError("--mu-list is required");
  if (f.eps) throw UsageError("sweep takes --mu-list, not --eps");
  const fs::path dir = f.out;
  fs::create_directories(dir);

  std::vector<double> mus = f.mu_list;
  std::sort(mus.begin(), mus.end());
  mus.erase(std::unique(mus.begin(), mus.end()), mus.end());

  std::vector<std::future<RunSummary>> jobs;
  for (double mu : mus) {
    RunFlags per = f;
    per.mu = mu;
    jobs.push_back(std::async(std::launch::async, [per] {
      auto prepared = prepare_run(per);
      return run_experiment(prepared.config, prepared.sequence).summary;
    }));
  }

  nlohmann::json combined = nlohmann::json::array();
  std::ofstream table(dir / "sweep.csv", std::ios::binary | std::ios::trunc);
  if (!table) throw IoError("cannot write", (dir / "sweep.csv").string());
  table << "mu,eps,n,final_lambda,loss_alg,best_beta,loss_best,regret,norm_regret,bound_total,bound_normalized,"
           "out_of_range_steps,projected_steps,theorem_valid\n";
  for (std::size_t k = 0; k < mus.size(); ++k) {
    const auto s = jobs[k].get();
    const auto j = to_json(s);
    write_text(dir / ("summary_mu_" + format_real(mus[k]) + ".json"), j.dump(2) + "\n");
    combined.push_back(j);
    table << format_real(s.mu) << ',' << format_real(s.eps) << ',' << s.n << ',' << format_real(s.final_lambda) << ','
          << format_real(s.loss_alg) << ',' << format_real(s.best_beta) << ',' << format_real(s.loss_best) << ','
          << format_real(s.regret) << ',' << format_real(s.norm_regret) << ',' << format_real(s.bound_total) << ','
          << format_real(s.bound_normalized) << ',' << s.out_of_range_steps << ',' << s.projected_steps << ','
          << (s.theorem_valid ? 1 : 0) << '\n';
    std::printf("mu=%-10.6g regret=%-12.6f bound_total=%-12.6f bound_normalized=%.6g\n", s.mu, s.regret,
                s.bound_total, s.bound_normalized);
  }
  write_text(dir / "sweep.json", combined.dump(2) + "\n");
  return 0;
}

// --------------------------------------------------------------------- verify

struct VerifyFlags {
  VerifyConfig cfg;
  std::optional<double> override_a;
  std::string out;
  std::string config;
};

int cmd_verify(VerifyFlags& f) {
  f.cfg.override_a = f.override_a;
  f.cfg.tolerance = inequality_tolerance();
  const auto report = run_verification(f.cfg);
  std::printf("tolerance=%.3g trials=%zu n=%zu seed=%llu isa=%s\n", report.config.tolerance, report.config.trials,
              report.config.n, static_cast<unsigned long long>(report.config.seed),
              kernels::isa_name(kernels::active_isa()));
  for (const auto& s : report.suites) {
    std::printf("%-20s %s  checks=%zu failures=%zu\n", s.name.c_str(), s.failures == 0 ? "PASS" : "FAIL", s.checks,
                s.failures);
  }
  std::printf("min_margin=%.6g skipped_out_of_range=%zu\n", report.min_margin, report.skipped_out_of_range);
  for (std::size_t k = 0; k < std::min<std::size_t>(report.failures.size(), 10); ++k) {
    const auto& fl = report.failures[k];
    std::printf("  %s trial=%zu seed=%llu step=%zu beta=%.6g value=%.6g %s\n", fl.suite.c_str(), fl.trial,
                static_cast<unsigned long long>(fl.seed), fl.step, fl.beta, fl.value, fl.detail.c_str());
  }
  if (!f.out.empty()) write_text(f.out, report.to_json().dump(2) + "\n");
  return report.passed() ? 0 : kExitFailure;
}

// ---------------------------------------------------------------- lemma-audit

struct LemmaFlags {
  std::optional<double> eps;
  std::optional<double> a;
  std::optional<double> b;
  std::optional<double> mu;
  double y_bound = 1.0;
  double lambda_plus = 0.08;
  std::size_t budget = 10000;
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
};

nlohmann::json to_json(const AuditInstance& i, const AuditReport& r) {
  return {{"y", i.y},         {"yhat1", i.yhat1},       {"yhat2", i.yhat2},       {"lambda_t", i.lambda_t},
          {"beta", i.beta},   {"lambda_t1", r.lambda_t1}, {"e_t", r.e_t},         {"e_beta", r.e_beta},
          {"lhs", r.lhs},     {"progress", r.progress}, {"margin", r.margin},     {"violated", r.violated}};
}

int cmd_lemma_audit(const LemmaFlags& f) {
  double a = 0.0, b = 0.0, mu = 0.0;
  if (f.eps) {
    if (f.a || f.b || f.mu) throw UsageError("give either --eps or --a/--b/--mu, not both");
    const auto c = constants_from_eps(*f.eps, f.y_bound, f.lambda_plus);
    a = c.a;
    b = c.b;
    mu = c.mu;
  } else {
    if (!f.a || !f.b || !f.mu) throw UsageError("--a, --b and --mu are all required without --eps");
    a = *f.a;
    b = *f.b;
    mu = *f.mu;
  }
  if (!(a > 0.0 && b > 0.0 && mu > 0.0)) throw DomainError("a, b and mu must be positive");
  const double tol = inequality_tolerance();

  const auto bounds = lemma_bounds(a, mu, f.lambda_plus);
  const auto [first, second] = construction_instances(f.y_bound, f.lambda_plus);
  const auto rep1 = evaluate_instance(a, b, mu, first, tol);
  const auto rep2 = evaluate_instance(a, b, mu, second, tol);
  const auto search = search_violations(a, b, mu, f.lambda_plus, f.y_bound, f.budget, f.seed, tol);

  std::printf("a=%.9g b=%.9g mu=%.9g lambda_plus=%.6g Y=%.6g tolerance=%.3g\n", a, b, mu, f.lambda_plus, f.y_bound,
              tol);
  std::printf("necessary conditions: mu >= %.6f (%s), b >= 4a + mu/4 = %.6f (%s), b >= 4a + a/(4k0) = %.6f (%s)\n",
              bounds.mu_min, mu >= bounds.mu_min ? "met" : "not met", bounds.b_min_via_mu,
              b >= bounds.b_min_via_mu ? "met" : "not met", bounds.b_min_combined,
              b >= bounds.b_min_combined ? "met" : "not met");
  std::printf("construction 1: lhs=%.6f progress=%.6f margin=%.6f %s\n", rep1.lhs, rep1.progress, rep1.margin,
              rep1.violated ? "VIOLATED" : "ok");
  std::printf("construction 2: lhs=%.6f progress=%.6f margin=%.6f %s\n", rep2.lhs, rep2.progress, rep2.margin,
              rep2.violated ? "VIOLATED" : "ok");
  std::printf("search: evaluated=%zu (grid %zu) witnesses=%zu\n", search.evaluated, search.grid_size,
              search.witnesses.size());
  if (!search.witnesses.empty()) {
    const auto& w = search.witnesses.front();
    std::printf("worst witness: y=%.6g yhat1=%.6g yhat2=%.6g lambda=%.6g beta=%.6g margin=%.6g\n", w.instance.y,
                w.instance.yhat1, w.instance.yhat2, w.instance.lambda_t, w.instance.beta, w.report.margin);
  }

  if (!f.out.empty()) {
    nlohmann::json j;
    j["constants"] = {{"a", a}, {"b", b}, {"mu", mu}, {"lambda_plus", f.lambda_plus}, {"y_bound", f.y_bound}};
    j["tolerance"] = tol;
    j["lemma_bounds"] = {{"mu_min", bounds.mu_min},
                         {"b_min_via_mu", bounds.b_min_via_mu},
                         {"b_min_combined", bounds.b_min_combined}};
    j["construction_1"] = to_json(first, rep1);
    j["construction_2"] = to_json(second, rep2);
    j["evaluated"] = search.evaluated;
    j["grid_size"] = search.grid_size;
    j["seed"] = f.seed;
    auto& ws = j["witnesses"];
    ws = nlohmann::json::array();
    for (const auto& w : search.witnesses) ws.push_back(to_json(w.instance, w.report));
    write_text(f.out, j.dump(2) + "\n");
  }
  return search.witnesses.empty() ? 0 : kExitFailure;
}

// ----------------------------------------------------------------------- plot

struct PlotFlags {
  std::string input;
  std::string out = "plot.svg";
  bool logx = false;
};

int cmd_plot(const PlotFlags& f) {
  const auto table = read_csv_table(f.input);
  const auto series = plot_series_from_table(table);
  PlotOptions opts;
  opts.logx = f.logx;
  write_text(f.out, render_plot_svg(series, opts));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online convex mixture of two experts: experiments and regret audits"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "Run the combiner and write trajectory + summary");
  add_run_options(*run_cmd, run_flags);
  run_cmd->add_option("--out", run_flags.out, "Trajectory CSV path");
  run_cmd->add_option("--summary", run_flags.summary, "Summary JSON path");

  RunFlags sweep_flags;
  sweep_flags.out = "sweep";
  auto* sweep_cmd = app.add_subcommand("sweep", "Run once per learning rate and tabulate");
  add_run_options(*sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--mu-list", sweep_flags.mu_list, "Comma-separated learning rates")->delimiter(',');
  sweep_cmd->add_option("--out", sweep_flags.out, "Output directory");

  VerifyFlags verify_flags;
  auto* verify_cmd = app.add_subcommand("verify", "Property suites over seeded random sequences");
  verify_cmd->add_option("--trials", verify_flags.cfg.trials, "Random sequences")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--n", verify_flags.cfg.n, "Steps per sequence")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", verify_flags.cfg.seed, "Base seed; trial k uses seed + k");
  verify_cmd->add_option("--eps", verify_flags.cfg.eps, "Constants are derived from eps")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--ybound", verify_flags.cfg.y_bound, "Signal bound Y")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--lambda-plus", verify_flags.cfg.lambda_plus, "Constraint boundary in (0, 1/2)");
  verify_cmd->add_option("--override-a", verify_flags.override_a, "Replace the derived a (breaks the constants)");
  verify_cmd->add_option("--resolution", verify_flags.cfg.oracle_resolution, "Grid resolution for the oracle check");
  verify_cmd->add_option("--out", verify_flags.out, "Report JSON path");
  verify_cmd->add_option("--config", verify_flags.config, "JSON file with default flag values");

  LemmaFlags lemma_flags;
  auto* lemma_cmd = app.add_subcommand("lemma-audit", "Evaluate the lemma constructions and search for violations");
  lemma_cmd->add_option("--eps", lemma_flags.eps, "Derive a, b, mu from eps")->check(CLI::PositiveNumber);
  lemma_cmd->add_option("--a", lemma_flags.a, "Loss weight a (with --b and --mu)");
  lemma_cmd->add_option("--b", lemma_flags.b, "Comparator weight b");
  lemma_cmd->add_option("--mu", lemma_flags.mu, "Learning rate");
  lemma_cmd->add_option("--ybound", lemma_flags.y_bound, "Signal bound Y")->check(CLI::PositiveNumber);
  lemma_cmd->add_option("--lambda-plus", lemma_flags.lambda_plus, "Constraint boundary in (0, 1/2)");
  lemma_cmd->add_option("--budget", lemma_flags.budget, "Instances to evaluate, grid first")->check(CLI::PositiveNumber);
  lemma_cmd->add_option("--seed", lemma_flags.seed, "Seed for the random fill");
  lemma_cmd->add_option("--out", lemma_flags.out, "Witness JSON path");
  lemma_cmd->add_option("--config", lemma_flags.config, "JSON file with default flag values");

  PlotFlags plot_flags;
  auto* plot_cmd = app.add_subcommand("plot", "SVG of time-normalized regret and bound");
  plot_cmd->add_option("--input", plot_flags.input, "Trajectory CSV")->required();
  plot_cmd->add_option("--out", plot_flags.out, "SVG path");
  plot_cmd->add_flag("--logx", plot_flags.logx, "Log-scale n axis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (run_cmd->parsed()) {
      apply_config(*run_cmd, run_flags.config);
      return cmd_run(run_flags);
    }
    if (sweep_cmd->parsed()) {
      apply_config(*sweep_cmd, sweep_flags.config);
      return cmd_sweep(sweep_flags);
    }
    if (verify_cmd->parsed()) {
      apply_config(*verify_cmd, verify_flags.config);
      return cmd_verify(verify_flags);
    }
    if (lemma_cmd->parsed()) {
      apply_config(*lemma_cmd, lemma_flags.config);
      return cmd_lemma_audit(lemma_flags);
    }
    if (plot_cmd->parsed()) return cmd_plot(plot_flags);
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitNumeric;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
