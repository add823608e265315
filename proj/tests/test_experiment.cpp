#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "eglab/experiment.hpp"

using eglab::build_operator;
using eglab::cmd_analyze;
using eglab::cmd_classify;
using eglab::cmd_reproduce;
using eglab::cmd_solve;
using eglab::cmd_sweep;
using eglab::config_error;
using eglab::ExperimentConfig;
using eglab::parse_config;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

fs::path test_dir(const std::string& name) {
  const fs::path dir = fs::path("eglab_test_out") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json run_solve(const json& cfg_json, const fs::path& dir) {
  ExperimentConfig cfg = parse_config(cfg_json);
  cfg.outputs.dir = dir;
  std::ostringstream out;
  REQUIRE(cmd_solve(cfg, out) == 0);
  return json::parse(out.str());
}

const json kDivergenceConfig = {
    {"operator", {{"kind", "named"}, {"name", "neg_identity"}}},
    {"solver", {{"gamma", 0.5}, {"max_iters", 20}}},
    {"x0", {1.0}}};

}  // namespace

TEST_CASE("config parsing applies defaults and validates fields") {
  const json minimal = {{"operator", {{"kind", "named"}, {"name", "rotation"}}}};
  const ExperimentConfig cfg = parse_config(minimal);
  CHECK(cfg.solver.gamma == 0.5);
  CHECK(cfg.solver.max_iters == 100);
  CHECK(cfg.solver.divergence_stop == 1e12);
  CHECK(cfg.outputs.write_csv);
  CHECK(cfg.outputs.write_json);
  CHECK(cfg.analysis.certified);
  CHECK(cfg.seed == 0);
}

TEST_CASE("config parsing rejects malformed documents with field diagnostics") {
  CHECK_THROWS_AS(parse_config(json::array()), config_error);
  CHECK_THROWS_AS(parse_config(json{{"solver", json::object()}}), config_error);

  // unknown fields anywhere are named in the error
  const json extra = {{"operator",
                       {{"kind", "named"}, {"name", "rotation"}, {"bogus", 1}}}};
  CHECK_THROWS_WITH(parse_config(extra),
                    Catch::Matchers::ContainsSubstring("operator.bogus"));

  // exactly one operator kind: matrix fields on a named operator are rejected
  const json mixed = {{"operator",
                       {{"kind", "named"},
                        {"name", "rotation"},
                        {"entries", {{0.0, 1.0}, {-1.0, 0.0}}}}}};
  CHECK_THROWS_AS(parse_config(mixed), config_error);

  const json bad_kind = {{"operator", {{"kind", "mystery"}}}};
  CHECK_THROWS_WITH(parse_config(bad_kind),
                    Catch::Matchers::ContainsSubstring("operator.kind"));

  const json bad_solver = {
      {"operator", {{"kind", "named"}, {"name", "rotation"}}},
      {"solver", {{"gamma", -1.0}}}};
  CHECK_THROWS_AS(parse_config(bad_solver), config_error);

  const json bad_named = {
      {"operator", {{"kind", "named"}, {"name", "damped_rotation"}}}};
  CHECK_THROWS_WITH(parse_config(bad_named),
                    Catch::Matchers::ContainsSubstring("damped_rotation"));

  const json certified_nonlinear = {
      {"operator", {{"kind", "named"}, {"name", "cubic_saddle"}}},
      {"analysis", "certified"}};
  CHECK_THROWS_AS(parse_config(certified_nonlinear), config_error);
}

TEST_CASE("operator specs build the expected operators") {
  const json spectrum_cfg = {
      {"operator",
       {{"kind", "spectrum"},
        {"eigenvalues", {{-0.1, 1.0}, {-0.1, -1.0}}},
        {"seed", 7}}}};
  const auto spectral = build_operator(parse_config(spectrum_cfg).op, 0);
  REQUIRE(spectral.linear);
  CHECK(spectral.linear->dimension() == 2);
  CHECK(spectral.linear->is_normal());
  CHECK(spectral.seed_used == 7ull);

  const json matrix_cfg = {
      {"operator", {{"kind", "matrix"}, {"entries", {{0.0, 1.0}, {-1.0, 0.0}}}}}};
  const auto dense = build_operator(parse_config(matrix_cfg).op, 0);
  REQUIRE(dense.linear);
  CHECK(dense.linear->operator_norm() == Catch::Approx(1.0).margin(1e-12));

  const json saddle_cfg = {
      {"operator", {{"kind", "named"}, {"name", "cubic_saddle"}}}};
  const auto saddle = build_operator(parse_config(saddle_cfg).op, 0);
  CHECK_FALSE(saddle.linear);
  CHECK(saddle.dimension == 2);
  eglab::Vector probe(2);
  probe << 2.0, 3.0;
  const eglab::Vector out = saddle.field(probe);
  CHECK(out[0] == 3.0 - 8.0);
  CHECK(out[1] == -2.0);
}

TEST_CASE("classify command emits the exact report for linear operators") {
  for (const auto& [name, mu, lipschitz] :
       {std::tuple<std::string, double, double>{"neg_identity", 1.0, 1.0},
        std::tuple<std::string, double, double>{"rotation", 0.0, 1.0}}) {
    json cfg_json = {{"operator", {{"kind", "named"}, {"name", name}}}};
    std::ostringstream out;
    REQUIRE(cmd_classify(parse_config(cfg_json), out) == 0);
    const json report = json::parse(out.str());
    CHECK(report.at("mu").get<double>() == Catch::Approx(mu).margin(1e-12));
    CHECK(report.at("lipschitz").get<double>() ==
          Catch::Approx(lipschitz).margin(1e-12));
    CHECK(report.at("monotone").get<bool>() == (mu == 0.0));
    CHECK(report.contains("cohypo"));
    CHECK(report.contains("min_sym_eig"));
  }

  const json damped = {{"operator",
                        {{"kind", "named"},
                         {"name", "damped_rotation"},
                         {"params", {0.1, 1.0}}}}};
  std::ostringstream out;
  REQUIRE(cmd_classify(parse_config(damped), out) == 0);
  const json report = json::parse(out.str());
  CHECK(report.at("mu").get<double>() == Catch::Approx(0.1).margin(1e-12));
  CHECK(report.at("lipschitz").get<double>() ==
        Catch::Approx(1.0049875621120890).margin(1e-12));
  CHECK_FALSE(report.at("monotone").get<bool>());
}

TEST_CASE("classify command samples nonlinear operators") {
  json cfg_json = {{"operator", {{"kind", "named"}, {"name", "cubic_saddle"}}},
                   {"sampling", {{"pairs", 5000}, {"radius", 1.0}}},
                   {"seed", 11}};
  std::ostringstream out;
  REQUIRE(cmd_classify(parse_config(cfg_json), out) == 0);
  const json report = json::parse(out.str());
  CHECK(report.at("method") == "sampled");
  CHECK_FALSE(report.at("monotone").get<bool>());
  // on the unit ball the cubic term bounds the modulus by 3 r^2
  CHECK(report.at("mu").get<double>() > 0.0);
  CHECK(report.at("mu").get<double>() <= 3.0 + 1e-9);
  CHECK(report.at("min_sym_eig").is_null());

  // deterministic per seed
  std::ostringstream again;
  REQUIRE(cmd_classify(parse_config(cfg_json), again) == 0);
  CHECK(out.str() == again.str());
}

TEST_CASE("cubic saddle certification matches the ball modulus bound") {
  const auto saddle = build_operator(
      parse_config(json{{"operator",
                         {{"kind", "named"}, {"name", "cubic_saddle"}}}})
          .op,
      0);
  const auto honest =
      eglab::certify_empirical(saddle.field, 2, 3.0, 20000, 1.0, 29);
  CHECK_FALSE(honest.violation_found);
  const auto false_claim =
      eglab::certify_empirical(saddle.field, 2, 0.0, 20000, 1.0, 29);
  CHECK(false_claim.violation_found);
}

TEST_CASE("solve command writes a trajectory and a recomputable report") {
  const auto dir = test_dir("solve_divergence");
  const json report = run_solve(kDivergenceConfig, dir);

  CHECK(report.at("trajectory").at("termination") == "budget_exhausted");
  CHECK(report.at("trajectory").at("iterations").get<int>() == 20);
  CHECK(report.at("class_report").at("mu").get<double>() ==
        Catch::Approx(1.0).margin(1e-12));
  CHECK(report.at("step_analysis").at("q_at_gamma").get<double>() ==
        Catch::Approx(3.0625).margin(1e-12));
  CHECK_FALSE(
      report.at("trajectory").at("gamma_outside_theorem_interval").get<bool>());

  // CSV re-parses; the ratio column recomputes from the error norms
  std::ifstream csv_in(dir / "trajectory.csv");
  const auto rows = eglab::csv::parse_trajectory(csv_in);
  REQUIRE(rows.size() == 21);
  CHECK_FALSE(rows[0].ratio.has_value());
  double log_sum = 0.0;
  int count = 0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    REQUIRE(rows[k].ratio.has_value());
    REQUIRE(rows[k].err_norm.has_value());
    REQUIRE(rows[k - 1].err_norm.has_value());
    CHECK(*rows[k].ratio ==
          Catch::Approx(*rows[k].err_norm / *rows[k - 1].err_norm)
              .margin(1e-9));
    CHECK(*rows[k].ratio == Catch::Approx(1.75).margin(1e-9));
    log_sum += std::log(*rows[k].ratio);
    ++count;
  }
  // geometric-mean ratio in the report recomputes from the CSV
  const double geo = std::exp(log_sum / count);
  CHECK(report.at("trajectory").at("geometric_mean_ratio").get<double>() ==
        Catch::Approx(geo).margin(1e-9));

  // report.json on disk matches the stdout report
  CHECK(json::parse(slurp(dir / "report.json")) == report);
}

TEST_CASE("solve command reruns byte-identically") {
  const auto dir_a = test_dir("rerun_a");
  const auto dir_b = test_dir("rerun_b");
  run_solve(kDivergenceConfig, dir_a);
  run_solve(kDivergenceConfig, dir_b);
  CHECK(slurp(dir_a / "trajectory.csv") == slurp(dir_b / "trajectory.csv"));
  CHECK(slurp(dir_a / "report.json") == slurp(dir_b / "report.json"));
}

TEST_CASE("solve command defaults x0 to the first basis vector") {
  const json cfg = {{"operator", {{"kind", "named"}, {"name", "rotation"}}},
                    {"solver", {{"gamma", 0.5}, {"max_iters", 200}}}};
  const auto dir = test_dir("solve_rotation");
  const json report = run_solve(cfg, dir);
  CHECK(report.at("trajectory").at("termination") == "residual_met");

  std::ifstream csv_in(dir / "trajectory.csv");
  const auto rows = eglab::csv::parse_trajectory(csv_in);
  REQUIRE_FALSE(rows.empty());
  CHECK(*rows[0].err_norm == 1.0);
  CHECK(report.at("trajectory").at("geometric_mean_ratio").get<double>() ==
        Catch::Approx(std::sqrt(0.8125)).margin(1e-9));
}

TEST_CASE("format restriction controls which files are written") {
  ExperimentConfig cfg = parse_config(kDivergenceConfig);
  const auto dir = test_dir("formats");
  cfg.outputs.dir = dir;
  cfg.outputs.write_csv = true;
  cfg.outputs.write_json = false;
  std::ostringstream out;
  REQUIRE(cmd_solve(cfg, out) == 0);
  CHECK(fs::exists(dir / "trajectory.csv"));
  CHECK_FALSE(fs::exists(dir / "report.json"));
}

TEST_CASE("analyze command reports roots, Rouché radius and contractive intervals") {
  const auto dir = test_dir("analyze");
  eglab::OutputSpec outputs;
  outputs.dir = dir;
  std::ostringstream out;
  REQUIRE(cmd_analyze(0.01, 1.0, 1.0, 1000, outputs, out) == 0);
  const json analysis = json::parse(out.str());

  CHECK(analysis.at("sign_changes").get<int>() == 2);
  REQUIRE(analysis.at("positive_roots").size() == 2);
  CHECK(analysis.at("positive_roots")[0].at("root").get<double>() ==
        Catch::Approx(0.020024057785000086).margin(1e-9));
  CHECK(analysis.at("positive_roots")[1].at("root").get<double>() ==
        Catch::Approx(0.97958740950996186).margin(1e-9));
  REQUIRE(analysis.at("contractive_intervals").size() == 1);
  CHECK(analysis.at("rouche_radius").is_number());

  std::ifstream sweep_in(dir / "sweep.csv");
  const auto rows = eglab::csv::parse_sweep(sweep_in);
  REQUIRE(rows.size() == 1000);
  for (const auto& row : rows) {
    CHECK(row.q ==
          Catch::Approx(eglab::q_of_gamma(0.01, 1.0, row.gamma)).margin(1e-12));
    CHECK(row.contractive == (row.q < 1.0));
  }

  // mu = 0 leaves the Rouché radius absent with a reason
  std::ostringstream out0;
  REQUIRE(cmd_analyze(0.0, 1.0, 2.0, 100, outputs, out0) == 0);
  const json no_rouche = json::parse(out0.str());
  CHECK(no_rouche.at("rouche_radius").is_null());
  CHECK(no_rouche.contains("rouche_note"));
}

TEST_CASE("sweep command writes the grid CSV") {
  const auto dir = test_dir("sweep");
  eglab::OutputSpec outputs;
  outputs.dir = dir;
  std::ostringstream out;
  REQUIRE(cmd_sweep(1.0, 1.0, 1.0, 50, outputs, out) == 0);
  std::ifstream sweep_in(dir / "sweep.csv");
  CHECK(eglab::csv::parse_sweep(sweep_in).size() == 50);
}

TEST_CASE("reproduce command passes every canned scenario") {
  for (const auto& name : eglab::reproduce_case_names()) {
    const auto dir = test_dir("repro_" + name);
    eglab::OutputSpec outputs;
    outputs.dir = dir;
    std::ostringstream out;
    REQUIRE(cmd_reproduce(name, outputs, out) == 0);
    INFO(out.str());
    CHECK(out.str().find("FAIL") == std::string::npos);
    CHECK(fs::exists(dir / name / "summary.json"));
  }

  eglab::OutputSpec outputs;
  outputs.dir = test_dir("repro_unknown");
  std::ostringstream out;
  CHECK_THROWS_WITH(cmd_reproduce("nosuch", outputs, out),
                    Catch::Matchers::ContainsSubstring("divergence"));
}

TEST_CASE("config hash is stable and content-sensitive") {
  const ExperimentConfig a = parse_config(kDivergenceConfig);
  const ExperimentConfig b = parse_config(kDivergenceConfig);
  CHECK(eglab::config_hash(a.raw) == eglab::config_hash(b.raw));

  json other = kDivergenceConfig;
  other["solver"]["gamma"] = 0.25;
  CHECK(eglab::config_hash(a.raw) !=
        eglab::config_hash(parse_config(other).raw));
}
