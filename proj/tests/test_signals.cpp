#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "convexmix/errors.hpp"
#include "convexmix/experiment.hpp"
#include "convexmix/rng.hpp"
#include "convexmix/signals.hpp"

using namespace convexmix;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "convexmix_tests";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const auto p = temp_file(name);
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("generate: built-in cases") {
  const auto c1 = generate(SequenceSpec::case1(4));
  REQUIRE(c1.size() == 4);
  const double expected2[] = {-0.5, 0.5, -0.5, 0.5};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(c1[i].y == 0.5);
    CHECK(c1[i].yhat1 == 0.5);
    CHECK(c1[i].yhat2 == expected2[i]);
  }
  const auto c2 = generate(SequenceSpec::case2(2));
  CHECK(c2[0] == SignalSample{0.5, 0.54, -0.5});
  CHECK(c2[1] == SignalSample{0.5, 0.54, 0.5});
  CHECK_THROWS_AS(generate(SequenceSpec::case2(2, 0.4)), DomainError);
}

TEST_CASE("generate: synthetic kinds") {
  SequenceSpec s;
  s.kind = SequenceKind::constant;
  s.n = 5;
  s.y_bound = 1.0;
  s.level = 0.0;
  for (const auto& x : generate(s)) CHECK(x == SignalSample{0, 0, 0});

  s.kind = SequenceKind::alternating;
  s.level = 0.8;
  const auto alt = generate(s);
  CHECK(alt[0].y == -0.8);
  CHECK(alt[1].y == 0.8);
  CHECK(alt[0].yhat2 == 0.8);

  s.kind = SequenceKind::square_wave;
  s.period = 2;
  const auto sq = generate(s);
  CHECK(sq[0].y == -0.8);
  CHECK(sq[1].y == -0.8);
  CHECK(sq[2].y == 0.8);
  CHECK(sq[4].y == -0.8);

  s.kind = SequenceKind::piecewise_switch;
  s.n = 6;
  s.switch_points = {4};
  const auto sw = generate(s);
  CHECK(sw[0].yhat1 == sw[0].y);
  CHECK(sw[2].yhat1 == sw[2].y);
  CHECK(sw[3].yhat2 == sw[3].y);
  CHECK(sw[3].yhat1 == -sw[3].y);

  s.level = 2.0;
  CHECK_THROWS_AS(generate(s), DomainError);
  s.level = 0.5;
  s.n = 0;
  CHECK_THROWS_AS(generate(s), DomainError);
  CHECK_THROWS_AS(parse_sequence_kind("sawtooth"), DomainError);
  CHECK(parse_sequence_kind("piecewise_switch") == SequenceKind::piecewise_switch);

  // Purity and bound compliance.
  s.n = 100;
  CHECK(generate(s) == generate(s));
  for (const auto& x : generate(s)) {
    CHECK(std::abs(x.y) <= s.y_bound);
    CHECK(std::abs(x.yhat1) <= s.y_bound);
    CHECK(std::abs(x.yhat2) <= s.y_bound);
  }
}

TEST_CASE("load_csv clips and counts") {
  const auto p = write_file("clip.csv", "y,yhat1,yhat2\n0.7,0.2,-0.1\n-0.3,-0.9,0.55\n0.1,0.1,0.1\n");
  const auto loaded = load_csv(p, 0.5);
  REQUIRE(loaded.samples.size() == 3);
  CHECK(loaded.samples[0] == SignalSample{0.5, 0.2, -0.1});
  CHECK(loaded.samples[1] == SignalSample{-0.3, -0.5, 0.5});
  CHECK(loaded.clip_count == 3);

  const auto inside = load_csv(p, 1.0);
  CHECK(inside.clip_count == 0);
  CHECK(inside.samples[0] == SignalSample{0.7, 0.2, -0.1});
}

TEST_CASE("load_csv errors carry row numbers") {
  auto expect_row = [](const std::string& text, std::size_t row) {
    const auto p = write_file("bad.csv", text);
    try {
      (void)load_csv(p, 1.0);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.row() == row);
    }
  };
  expect_row("y,yhat1,yhat2\n0.1,0.2\n", 2);
  expect_row("y,yhat1,yhat2\n0.1,0.2,0.3\n0.1,0.2,0.3,0.4\n", 3);
  expect_row("y,yhat1,yhat2\n0.1,abc,0.3\n", 2);
  expect_row("y,yhat1,yhat2\n0.1,nan,0.3\n", 2);
  expect_row("y,yhat1\n0.1,0.2\n", 1);
  expect_row("", 1);
  expect_row("y,yhat1,yhat2\n", 2);
  CHECK_THROWS_AS(load_csv(temp_file("does_not_exist.csv"), 1.0), IoError);
}

TEST_CASE("write_trajectory: case 1 two steps and roundtrip") {
  LoadedSequence seq{generate(SequenceSpec::case1(2)), 0};
  RunConfig cfg;
  cfg.params = MixtureParams{0.08, 0.08, 0.5, ConstraintMode::project};
  const auto res = run_experiment(cfg, seq);
  const auto p = temp_file("traj2.csv");
  write_trajectory(res.rows, p);

  std::ifstream in(p);
  std::string header, line;
  std::getline(in, header);
  CHECK(header ==
        "t,y,yhat1,yhat2,lambda,rho,yhat,e,cum_loss,best_beta_prefix,best_loss_prefix,regret,norm_regret,"
        "bound_norm,in_range,projected");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);

  const auto back = read_trajectory(p);
  REQUIRE(back.size() == 2);
  CHECK(back[0].cum_loss == 0.25);
  CHECK(back[1].cum_loss == 0.25);

  CHECK_THROWS_AS(write_trajectory({}, temp_file("empty.csv")), DomainError);
}

TEST_CASE("property: trajectory echo columns and lambda roundtrip exactly") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    LoadedSequence seq;
    for (int i = 0; i < 200; ++i) {
      seq.samples.push_back({uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)});
    }
    RunConfig cfg;
    cfg.params = MixtureParams{0.7, 0.05, 1.0, ConstraintMode::monitor};
    const auto res = run_experiment(cfg, seq);
    const auto p = temp_file("roundtrip.csv");
    write_trajectory(res.rows, p);

    const auto reloaded = load_csv(p, 1.0);
    CHECK(reloaded.clip_count == 0);
    CHECK(reloaded.samples == seq.samples);
    const auto rows = read_trajectory(p);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      REQUIRE(rows[i].lambda == res.rows[i].lambda);
      REQUIRE(rows[i].rho == res.rows[i].rho);
      REQUIRE(rows[i].regret == res.rows[i].regret);
    }
  }
}

TEST_CASE("sequence spec JSON and materialize") {
  const auto csv = write_file("spec_data.csv", "y,yhat1,yhat2\n2,0,0\n0.1,0.1,0.1\n0.2,0.2,0.2\n");
  const auto spec_path = write_file("spec.json", R"({"kind":"custom_file","y_bound":1.0,"path":"spec_data.csv","n":2})");
  const auto spec = SequenceSpec::from_json_file(spec_path);
  CHECK(spec.kind == SequenceKind::custom_file);
  const auto loaded = materialize(spec);
  CHECK(loaded.samples.size() == 2);
  CHECK(loaded.clip_count == 1);
  CHECK_THROWS_AS(generate(spec), DomainError);

  const auto sw_path =
      write_file("sw.json", R"({"kind":"piecewise_switch","n":10,"y_bound":1,"level":0.5,"switch_points":[6]})");
  const auto sw = materialize(SequenceSpec::from_json_file(sw_path));
  CHECK(sw.samples.size() == 10);
  CHECK(sw.samples[5].yhat2 == sw.samples[5].y);

  const auto bad = write_file("bad_spec.json", R"({"kind":"nope","y_bound":1})");
  CHECK_THROWS_AS(SequenceSpec::from_json_file(bad), DomainError);
}

TEST_CASE("format_real is lossless") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 1000; ++i) {
    const double v = uniform(rng, -1e3, 1e3) * std::pow(10.0, uniform(rng, -10, 10));
    CHECK(std::stod(format_real(v)) == v);
  }
  CHECK(format_real(0.25) == "0.25");
}
