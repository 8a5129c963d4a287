#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cape/cli/commands.hpp"
#include "cape/errors.hpp"

using namespace cape;
using namespace cape::cli;

namespace {

struct RequestFlags {
  std::optional<std::int64_t> n, r11, r10, r01, r_star1;
  std::optional<double> pi0;
  double alpha = 0.0, beta = 0.0, alpha0 = 0.0;
  std::vector<std::string> estimators;
  std::vector<std::string> intervals;
  std::optional<int> cell;
  std::optional<double> pilot;
  double level = 0.95;
  bool clamp = false;
  std::string format = "text";
  std::string dataset;
  std::string request_file;
};

void add_count_flags(CLI::App* cmd, RequestFlags& f) {
  cmd->add_option("--n", f.n, "survey sample size");
  cmd->add_option("--r11", f.r11, "positive in survey and official record");
  cmd->add_option("--r10", f.r10, "negative in survey, official positive");
  cmd->add_option("--r01", f.r01, "positive in survey, not officially recorded");
  cmd->add_option("--r-star1", f.r_star1, "survey positives (partial counts, R10 = 0)");
  cmd->add_option("--pi0", f.pi0, "official proportion");
  cmd->add_option("--alpha", f.alpha, "survey false-positive rate");
  cmd->add_option("--alpha0", f.alpha0, "official false-positive rate");
  cmd->add_option("--level", f.level, "confidence level");
  cmd->add_flag("--clamp", f.clamp, "clamp intervals to [pi_lower, 1]");
  cmd->add_option("--dataset", f.dataset, "embedded dataset (austria)")
      ->check(CLI::IsMember({"austria"}));
}

EstimateRequest build_request(const RequestFlags& f) {
  EstimateRequest r;
  if (!f.request_file.empty()) {
    std::ifstream in(f.request_file, std::ios::binary);
    if (!in) throw DomainError("cannot read request file '" + f.request_file + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw DomainError(std::string("request file is not valid JSON: ") + e.what());
    }
    r = request_from_json(j);
    r.format = parse_format(f.format);
    return r;
  }
  if (f.dataset == "austria") {
    r.n = CaseStudyDataset::n;
    r.r_star1 = CaseStudyDataset::r_star1;
    r.r11 = CaseStudyDataset::r11;
    r.pi0 = CaseStudyDataset::pi0;
  }
  if (f.n) r.n = f.n;
  if (f.r11) r.r11 = f.r11;
  if (f.r10) r.r10 = f.r10;
  if (f.r01) r.r01 = f.r01;
  if (f.r_star1) r.r_star1 = f.r_star1;
  if (f.pi0) r.pi0 = f.pi0;
  if (f.r10 || f.r01) r.r_star1.reset();
  r.rates = ErrorRates{f.alpha, f.beta, f.alpha0};
  for (const auto& e : f.estimators) r.estimators.push_back(parse_estimator(e));
  for (const auto& m : f.intervals) {
    if (m == "none") r.no_intervals = true;
    else r.intervals.push_back(parse_interval(m));
  }
  r.cell = f.cell;
  r.pilot = f.pilot;
  r.level = f.level;
  r.clamp = f.clamp;
  r.format = parse_format(f.format);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cape: prevalence estimation from a survey combined with official counts"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "cape 1.0.0");

  RequestFlags est;
  auto* estimate = app.add_subcommand("estimate", "estimate prevalence for one dataset");
  add_count_flags(estimate, est);
  estimate->add_option("--beta", est.beta, "survey false-negative rate");
  estimate->add_option("--estimator", est.estimators,
                       "survey-mle, cmle, mmle, mme, cell-mme, gmm (comma separated)")
      ->delimiter(',');
  estimate->add_option("--ci", est.intervals,
                       "cp-rstar1, cp-r01, asymptotic-cmle, asymptotic-mmle or none")
      ->delimiter(',');
  estimate->add_option("--cell", est.cell, "cell for cell-mme: 1=11, 2=10, 3=01, 4=00");
  estimate->add_option("--pilot", est.pilot, "pilot estimate for gmm weights");
  estimate->add_option("--format", est.format, "text, json or csv");
  estimate->add_option("--request", est.request_file, "JSON request (e.g. earlier json output)");

  std::string config_path;
  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "run Monte Carlo scenarios from a config file");
  simulate->add_option("config", config_path, "scenario config file")->required();
  simulate->add_option("--workers", sim.workers, "OpenMP threads (0: default)");
  simulate->add_flag("--full-reps", sim.full_reps, "use 50000 replicates per scenario");
  simulate->add_option("--seed", sim.seed, "override the config seed");
  simulate->add_option("--replicates", sim.replicates, "override the replicate count");

  RequestFlags sens;
  sens.format = "csv";
  SensitivityOptions sens_opts;
  auto* sensitivity = app.add_subcommand("sensitivity", "sweep the survey false-negative rate");
  add_count_flags(sensitivity, sens);
  sensitivity->add_option("--beta-min", sens_opts.beta_min, "first beta");
  sensitivity->add_option("--beta-max", sens_opts.beta_max, "last beta");
  sensitivity->add_option("--steps", sens_opts.steps, "number of beta values");
  sensitivity->add_option("--format", sens.format, "csv, json or text");

  std::vector<double> multipliers{1.5, 2.0};
  std::string case_format = "text";
  auto* case_study = app.add_subcommand("case-study", "Austrian November 2020 case study table");
  case_study->add_option("--k", multipliers, "survey scale multipliers (>= 1)")->delimiter(',');
  case_study->add_option("--format", case_format, "text, json or csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  if (*estimate) {
    EstimateRequest req;
    const int rc = guarded(std::cerr, [&] {
      req = build_request(est);
      return kExitOk;
    });
    if (rc != kExitOk) return rc;
    return cmd_estimate(req, std::cout, std::cerr);
  }
  if (*simulate) return cmd_simulate(config_path, sim, std::cout, std::cerr);
  if (*sensitivity) {
    EstimateRequest req;
    const int rc = guarded(std::cerr, [&] {
      req = build_request(sens);
      return kExitOk;
    });
    if (rc != kExitOk) return rc;
    return cmd_sensitivity(req, sens_opts, std::cout, std::cerr);
  }
  if (*case_study) {
    OutputFormat fmt{};
    const int rc = guarded(std::cerr, [&] {
      fmt = parse_format(case_format);
      return kExitOk;
    });
    if (rc != kExitOk) return rc;
    return cmd_case_study(multipliers, fmt, std::cout, std::cerr);
  }
  return kExitInput;
}
