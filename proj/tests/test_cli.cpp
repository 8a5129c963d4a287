#include "doctest.h"

#include <sstream>

#include "cape/cli/commands.hpp"
#include "cape/cli/csv.hpp"
#include "cape/errors.hpp"

using namespace cape;
using namespace cape::cli;

namespace {

EstimateRequest austria() {
  EstimateRequest r;
  r.n = CaseStudyDataset::n;
  r.r_star1 = CaseStudyDataset::r_star1;
  r.r11 = CaseStudyDataset::r11;
  r.pi0 = CaseStudyDataset::pi0;
  return r;
}

const char* kSmallConfig = R"(# two scenarios
[scenario]
setting = I
pi = 0.05
grid_points = 3
replicates = 300
seed = 11
intervals = cp-rstar1, asymptotic-cmle

[scenario]
setting = custom
alpha = 0.01
beta = 0.05
alpha0 = 0.002
pi = 0.1
pi0 = 0.04
replicates = 200
estimators = mme, gmm
)";

}  // namespace

TEST_CASE("csv quoting and number formatting") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("percent formatting keeps four significant digits") {
  CHECK(percent(0.0301579) == "3.016%");
  CHECK(percent(0.039) == "3.900%");
  CHECK(percent(0.0) == "0.000%");
  CHECK(percent(1.0) == "100.0%");
}

TEST_CASE("estimate: MME on the case-study inputs") {
  auto req = austria();
  req.estimators = {EstimatorKind::MME};
  req.no_intervals = true;
  std::ostringstream out, err;
  CHECK(cmd_estimate(req, out, err) == kExitOk);
  CHECK(out.str().find("3.016%") != std::string::npos);

  req.format = OutputFormat::Json;
  std::ostringstream js;
  CHECK(cmd_estimate(req, js, err) == kExitOk);
  const auto j = nlohmann::json::parse(js.str());
  CHECK(std::abs(j["estimates"][0]["point"].get<double>() - 0.0301579) < 1e-6);
}

TEST_CASE("estimate: exit codes") {
  std::ostringstream out, err;
  auto missing = austria();
  missing.pi0.reset();
  CHECK(cmd_estimate(missing, out, err) == kExitInput);
  CHECK(err.str().find("pi0") != std::string::npos);

  auto cell = austria();
  cell.estimators = {EstimatorKind::CellMME};
  cell.cell = 1;
  err.str("");
  CHECK(cmd_estimate(cell, out, err) == kExitDegenerate);
  CHECK(err.str().find("degenerate") != std::string::npos);

  auto bad = austria();
  bad.rates = ErrorRates{0.6, 0.5, 0.0};
  err.str("");
  CHECK(cmd_estimate(bad, out, err) == kExitInput);
  CHECK(err.str().find("assumption 1") != std::string::npos);

  auto both = austria();
  both.r10 = 0;
  both.r01 = 39;
  CHECK(cmd_estimate(both, out, err) == kExitInput);
}

TEST_CASE("estimate: partial counts with beta > 0 warn") {
  auto req = austria();
  req.rates.beta = 0.1;
  std::ostringstream out, err;
  CHECK(cmd_estimate(req, out, err) == kExitOk);
  CHECK(err.str().find("warning") != std::string::npos);

  req.rates.beta = 0.0;
  std::ostringstream err2;
  CHECK(cmd_estimate(req, out, err2) == kExitOk);
  CHECK(err2.str().empty());
}

TEST_CASE("estimate: JSON output re-ingested reproduces the report") {
  for (const auto& rates : {ErrorRates{}, ErrorRates{0.01, 0.1, 0.0}, ErrorRates{0.01, 0.05, 0.002}}) {
    EstimateRequest req;
    req.n = 2287;
    req.r11 = 32;
    req.r10 = rates.beta > 0 ? 3 : 0;  // tau10 is zero without errors
    req.r01 = 39;
    req.pi0 = CaseStudyDataset::pi0;
    req.rates = rates;
    req.format = OutputFormat::Json;
    std::ostringstream first, err;
    REQUIRE(cmd_estimate(req, first, err) == kExitOk);

    auto again = request_from_json(nlohmann::json::parse(first.str()));
    again.format = OutputFormat::Json;
    std::ostringstream second;
    REQUIRE(cmd_estimate(again, second, err) == kExitOk);
    CHECK(first.str() == second.str());
  }
}

TEST_CASE("estimate: csv output carries the schema tag") {
  auto req = austria();
  req.format = OutputFormat::Csv;
  std::ostringstream out, err;
  CHECK(cmd_estimate(req, out, err) == kExitOk);
  CHECK(out.str().rfind("# cape-csv v1\n", 0) == 0);
  CHECK(out.str().find('\r') == std::string::npos);
}

TEST_CASE("config parsing") {
  const auto cfg = parse_config(kSmallConfig);
  REQUIRE(cfg.blocks.size() == 2);
  CHECK(cfg.blocks[0].expand().size() == 3);
  CHECK(cfg.blocks[0].base.intervals.size() == 2);
  CHECK(cfg.blocks[1].base.rates.alpha0 == 0.002);
  CHECK(cfg.blocks[1].base.estimators.size() == 2);

  const auto defaults = parse_config("[scenario]\nsetting = II\npi = 0.2\npi0 = 0.1\n");
  CHECK(defaults.blocks[0].base.replicates == kDeskReplicatesRmse);
  CHECK(defaults.blocks[0].base.rates.beta == 0.02);
  const auto with_ci =
      parse_config("[scenario]\nsetting = I\npi = 0.2\npi0 = 0.1\nintervals = cp-r01\n");
  CHECK(with_ci.blocks[0].base.replicates == kDeskReplicatesIntervals);
}

TEST_CASE("config errors carry line and key") {
  auto fails = [](const char* text, int line, const char* key) {
    try {
      parse_config(text);
      FAIL("expected a config error");
    } catch (const ConfigError& e) {
      CHECK(e.line() == line);
      CHECK(e.key() == key);
    }
  };
  fails("[scenario]\nsetting = I\npi = 0.05\npi0 = 0.02\nreplicate = 5\n", 5, "replicate");
  fails("[scenario]\nsetting = I\npi = 0.05\npi0 = 0.02\nestimators =\n", 5, "estimators");
  fails("setting = I\n", 1, "setting");
  fails("[scenario]\nsetting = I\npi = 0.05\npi = 0.06\npi0 = 0.02\n", 4, "pi");
  fails("[scenario]\nsetting = I\npi = abc\npi0 = 0.02\n", 3, "pi");
  fails("[scenario]\nsetting = II\nbeta = 0.1\npi = 0.05\npi0 = 0.02\n", 3, "beta");
  fails("[runs]\n", 1, "[runs]");
  fails("[scenario]\nsetting = I\npi = 0.05\n", 1, "pi0");
}

TEST_CASE("simulate: csv layout and determinism") {
  SimulateOptions opt;
  opt.workers = 1;
  std::ostringstream a, b, err;
  REQUIRE(cmd_simulate_text(kSmallConfig, opt, a, err) == kExitOk);
  opt.workers = 8;
  REQUIRE(cmd_simulate_text(kSmallConfig, opt, b, err) == kExitOk);
  CHECK(a.str() == b.str());

  std::istringstream lines(a.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "# cape-csv v1");
  std::getline(lines, line);
  CHECK(line.rfind("# ", 0) == 0);
  std::getline(lines, line);
  CHECK(line == kSimulateHeader);
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 14);
  }
  // block 1: 3 grid points x (4 estimators + 2 intervals); block 2: 2 estimators
  CHECK(rows == 3 * 6 + 2);
}

TEST_CASE("simulate: config errors exit 2") {
  SimulateOptions opt;
  std::ostringstream out, err;
  CHECK(cmd_simulate_text("[scenario]\nsetting = I\npi = 0.05\npi0 = 0.02\nestimators =\n", opt, out,
                          err) == kExitInput);
  CHECK(err.str().find("line 5") != std::string::npos);
  CHECK(cmd_simulate("/nonexistent/cape.toml", opt, out, err) == kExitInput);
}

TEST_CASE("simulate: option overrides") {
  SimulateOptions opt;
  opt.full_reps = true;
  const auto sc = simulation_scenarios(parse_config(kSmallConfig), opt);
  for (const auto& s : sc) CHECK(s.replicates == kFullReplicates);
  opt.seed = 99;
  opt.replicates = 10;
  for (const auto& s : simulation_scenarios(parse_config(kSmallConfig), opt)) {
    CHECK(s.seed == 99);
    CHECK(s.replicates == 10);
  }
}

TEST_CASE("sensitivity") {
  auto req = austria();
  req.rates.alpha = 0.01;
  SensitivityOptions opt;
  const auto rows = sensitivity_rows(req, opt);
  REQUIRE(rows.size() == 2 * 31);
  const double smle_change = rows[60].point - rows[0].point;
  const double mme_change = rows[61].point - rows[1].point;
  CHECK(std::abs(mme_change) < std::abs(smle_change));
  CHECK(rows[0].kind == EstimatorKind::SurveyMLE);
  CHECK(rows[1].kind == EstimatorKind::MME);

  // with alpha = 0 the MME is (R01/n + (1 - beta) pi0) / Delta
  auto no_alpha = austria();
  const auto r2 = sensitivity_rows(no_alpha, opt);
  for (std::size_t i = 1; i < r2.size(); i += 2) {
    const double b = r2[i].beta;
    CHECK(r2[i].point ==
          doctest::Approx((39.0 / 2287 + (1 - b) * CaseStudyDataset::pi0) / (1 - b)).epsilon(1e-13));
  }
  // beta = 0, alpha = 0 row equals the no-error estimates
  CHECK(r2[0].point == survey_mle(SurveyCounts::from_partial(2287, 71, 32), ErrorRates{}).point);

  SensitivityOptions over;
  over.beta_max = 0.995;
  std::ostringstream out, err;
  CHECK(cmd_sensitivity(req, over, out, err) == kExitInput);
}

TEST_CASE("case study") {
  const auto rows = case_study_rows({1.5, 2.0});
  REQUIRE(rows.size() == 10);
  CHECK(rows[0].method == "CMLE-as");
  CHECK(std::abs(rows[0].point - 0.0301732) < 1e-6);
  CHECK(std::abs(rows[1].point - 0.0301579) < 1e-6);
  CHECK(rows[2].point == doctest::Approx(71.0 / 2287).epsilon(1e-15));
  CHECK(rows[4].n == 4574);
  CHECK(rows[4].r_star1 == 142);
  CHECK(rows[4].point == doctest::Approx(142.0 / 4574).epsilon(1e-15));
  CHECK(rows[3].n == 3431);
  CHECK(rows[3].r_star1 == 107);
  CHECK(rows[4].intervals[1].length() < rows[2].intervals[1].length());

  const auto base = case_study_rows({1.0});
  CHECK(base[3].point == base[2].point);
  CHECK(base[3].intervals[1].lower == base[2].intervals[1].lower);
  CHECK_THROWS_AS(case_study_rows({0.5}), DomainError);

  // levels 0.80 < 0.95 < 0.99 nest on every row
  for (const auto& r : rows) {
    CHECK(r.intervals[2].lower <= r.intervals[1].lower);
    CHECK(r.intervals[1].lower <= r.intervals[0].lower);
    CHECK(r.intervals[0].upper <= r.intervals[1].upper);
    CHECK(r.intervals[1].upper <= r.intervals[2].upper);
  }

  std::ostringstream out, err;
  CHECK(cmd_case_study({1.5, 2.0}, OutputFormat::Csv, out, err) == kExitOk);
  CHECK(out.str().rfind("# cape-csv v1\n", 0) == 0);
}
