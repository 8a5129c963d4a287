#include "cape/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cape/cli/csv.hpp"
#include "cape/errors.hpp"
#include "cape/montecarlo.hpp"

namespace cape::cli {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string pad(std::string s, std::size_t width, bool left = true) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return left ? s + fill : fill + s;
}

std::string ci_text(const ConfidenceInterval& ci) {
  return "[" + percent(ci.lower) + ", " + percent(ci.upper) + "]";
}

std::string level_text(double level) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g%%", 100.0 * level);
  return buf;
}

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
}

Cell cell_from_index(int index) {
  if (index < 1 || index > 4) throw DomainError("--cell must be 1, 2, 3 or 4 (cells 11, 10, 01, 00)");
  return kAllCells[static_cast<std::size_t>(index - 1)];
}

nlohmann::json estimate_json(const PrevalenceEstimate& e) {
  nlohmann::json j;
  j["estimator"] = std::string(estimator_name(e.kind));
  if (e.kind == EstimatorKind::CellMME) j["cell"] = cell_name(e.cell);
  j["point"] = e.point;
  j["raw"] = e.raw;
  j["variance"] = e.variance;
  j["at_boundary"] = e.at_boundary;
  j["info"] = e.info ? nlohmann::json(*e.info) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json interval_json(const ConfidenceInterval& ci) {
  return {{"method", std::string(interval_name(ci.method))},
          {"level", ci.level},
          {"lower", ci.lower},
          {"upper", ci.upper},
          {"clamped", ci.clamped}};
}

void write_estimate_text(const EstimateReport& r, std::ostream& out) {
  const auto& c = r.counts;
  const auto& q = r.request;
  out << "counts: n = " << c.n() << ", R11 = " << c.r11() << ", R10 = " << c.r10()
      << ", R01 = " << c.r01() << ", R00 = " << c.r00();
  if (q.partial()) out << " (R10 = 0 from partial counts)";
  out << '\n';
  out << "official proportion pi0 = " << percent(*q.pi0) << ", lower bound of pi = "
      << percent(r.pi_lower) << '\n';
  out << "error rates: alpha = " << percent(q.rates.alpha) << ", beta = " << percent(q.rates.beta)
      << ", alpha0 = " << percent(q.rates.alpha0) << "\n\n";

  out << pad("estimator", 12) << pad("estimate", 11) << pad("std.err", 11) << pad("variance", 12)
      << "boundary\n";
  for (const auto& e : r.estimates) {
    std::string name(estimator_name(e.kind));
    if (e.kind == EstimatorKind::CellMME) name += std::string("[") + cell_name(e.cell) + "]";
    const std::string se = std::isfinite(e.variance) ? percent(std::sqrt(e.variance)) : "n/a";
    out << pad(name, 12) << pad(percent(e.point), 11) << pad(se, 11) << pad(sci(e.variance), 12)
        << (e.at_boundary ? "yes" : "no") << '\n';
  }
  if (r.gmm_weights) {
    const auto& w = *r.gmm_weights;
    out << "gmm weights: gamma = (" << sci(w.gamma1) << ", " << sci(w.gamma2) << ", "
        << sci(w.gamma3) << "), lambda = " << sci(w.lambda) << '\n';
  }
  if (!r.intervals.empty()) {
    out << '\n' << pad("interval", 18) << pad("level", 7) << "bounds\n";
    for (const auto& ci : r.intervals)
      out << pad(std::string(interval_name(ci.method)), 18) << pad(level_text(ci.level), 7)
          << ci_text(ci) << (ci.clamped ? " (clamped)" : "") << '\n';
  }
}

void write_estimate_csv(const EstimateReport& r, std::ostream& out) {
  CsvWriter csv(out);
  csv.schema_tag();
  csv.row({"record", "name", "level", "point", "raw", "variance", "at_boundary", "lower", "upper",
           "clamped"});
  for (const auto& e : r.estimates) {
    std::string name(estimator_name(e.kind));
    if (e.kind == EstimatorKind::CellMME) name += std::string(":") + cell_name(e.cell);
    csv.row({"estimate", name, "", field(e.point), field(e.raw), field(e.variance),
             e.at_boundary ? "true" : "false", "", "", ""});
  }
  for (const auto& ci : r.intervals)
    csv.row({"interval", std::string(interval_name(ci.method)), field(ci.level), "", "", "", "",
             field(ci.lower), field(ci.upper), ci.clamped ? "true" : "false"});
}

}  // namespace

std::string percent(double proportion) {
  if (!std::isfinite(proportion)) return "n/a";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%#.4g%%", 100.0 * proportion);
  return buf;
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const DegenerateError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
}

// estimate

EstimateReport compute_estimate(const EstimateRequest& request) {
  EstimateReport r;
  r.request = request.resolved();
  const EstimateRequest& q = r.request;
  r.counts = q.counts();
  const OfficialContext ctx = q.context();
  r.pi_lower = ctx.pi_lower();
  r.warnings = q.warnings();
  if (!q.intervals.empty()) check_level(q.level);

  std::optional<PrevalenceEstimate> cmle, mmle;
  auto get_cmle = [&]() -> const PrevalenceEstimate& {
    if (!cmle) cmle = conditional_mle(r.counts, ctx, q.rates);
    return *cmle;
  };
  auto get_mmle = [&]() -> const PrevalenceEstimate& {
    if (!mmle) mmle = marginal_mle(r.counts.r11(), r.counts.r01(), r.counts.n(), ctx, q.rates);
    return *mmle;
  };

  for (auto kind : q.estimators) {
    switch (kind) {
      case EstimatorKind::SurveyMLE: r.estimates.push_back(survey_mle(r.counts, q.rates)); break;
      case EstimatorKind::ConditionalMLE: r.estimates.push_back(get_cmle()); break;
      case EstimatorKind::MarginalMLE: r.estimates.push_back(get_mmle()); break;
      case EstimatorKind::MME: r.estimates.push_back(mme(r.counts, ctx, q.rates)); break;
      case EstimatorKind::CellMME:
        if (!q.cell) throw DomainError("estimator cell-mme needs --cell 1..4");
        r.estimates.push_back(cell_mme(cell_from_index(*q.cell), r.counts, ctx, q.rates));
        break;
      case EstimatorKind::OptimalGMM: {
        const GmmResult g = optimal_gmm(r.counts, ctx, q.rates, q.pilot);
        r.estimates.push_back(g.estimate);
        r.gmm_weights = g.weights;
        break;
      }
    }
  }

  for (auto method : q.intervals) {
    switch (method) {
      case IntervalMethod::CpRstar1:
        r.intervals.push_back(cp_survey_interval(r.counts, ctx, q.rates, q.level, q.clamp));
        break;
      case IntervalMethod::CpR01:
        r.intervals.push_back(cp_mme_interval(r.counts, ctx, q.rates, q.level, q.clamp));
        break;
      case IntervalMethod::AsymptoticCmle:
        r.intervals.push_back(asymptotic_interval(get_cmle(), r.counts.n(), q.level, ctx, q.clamp));
        break;
      case IntervalMethod::AsymptoticMmle:
        r.intervals.push_back(asymptotic_interval(get_mmle(), r.counts.n(), q.level, ctx, q.clamp));
        break;
    }
  }
  return r;
}

nlohmann::json to_json(const EstimateReport& r) {
  nlohmann::json j;
  j["request"] = to_json(r.request);
  j["counts"] = {{"n", r.counts.n()},
                 {"r11", r.counts.r11()},
                 {"r10", r.counts.r10()},
                 {"r01", r.counts.r01()},
                 {"r00", r.counts.r00()}};
  j["pi_lower"] = r.pi_lower;
  j["warnings"] = r.warnings;
  auto& est = j["estimates"] = nlohmann::json::array();
  for (const auto& e : r.estimates) est.push_back(estimate_json(e));
  if (r.gmm_weights) {
    const auto& w = *r.gmm_weights;
    j["gmm_weights"] = {{"gamma1", w.gamma1}, {"gamma2", w.gamma2}, {"gamma3", w.gamma3},
                        {"lambda", w.lambda}};
  }
  auto& ints = j["intervals"] = nlohmann::json::array();
  for (const auto& ci : r.intervals) ints.push_back(interval_json(ci));
  return j;
}

int cmd_estimate(const EstimateRequest& request, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const EstimateReport r = compute_estimate(request);
    for (const auto& w : r.warnings) err << "warning: " << w << '\n';
    switch (request.format) {
      case OutputFormat::Text: write_estimate_text(r, out); break;
      case OutputFormat::Json: out << to_json(r).dump(2) << '\n'; break;
      case OutputFormat::Csv: write_estimate_csv(r, out); break;
    }
    return kExitOk;
  });
}

// simulate

std::vector<Scenario> simulation_scenarios(const SimulationConfig& config,
                                           const SimulateOptions& options) {
  std::vector<Scenario> out;
  for (const auto& block : config.blocks) {
    for (auto s : block.expand()) {
      if (options.seed) s.seed = *options.seed;
      if (options.full_reps) s.replicates = kFullReplicates;
      if (options.replicates) s.replicates = *options.replicates;
      s.validate();
      out.push_back(std::move(s));
    }
  }
  return out;
}

void write_simulation_csv(const std::vector<ScenarioResult>& results, std::ostream& out) {
  CsvWriter csv(out);
  csv.schema_tag();
  csv.comment("pi0 grid: equally spaced from max(1.025*alpha0, 0.025*pi) to 0.975*pi inclusive");
  out << kSimulateHeader << '\n';
  for (const auto& res : results) {
    const Scenario& s = res.scenario;
    const std::vector<std::string> head{std::string(setting_name(s.setting)), field(s.pi),
                                        field(s.pi0), std::to_string(s.n),
                                        std::to_string(s.replicates), std::to_string(s.seed)};
    for (const auto& e : res.estimators) {
      auto row = head;
      row.insert(row.end(), {std::string(estimator_name(e.kind)), field(e.mean), field(e.rmse),
                             field(e.rel_rmse_vs_cmle), "", "", "", "",
                             std::to_string(e.failures)});
      csv.row(row);
    }
    for (const auto& i : res.intervals) {
      auto row = head;
      row.insert(row.end(), {"", "", "", "", std::string(interval_name(i.method)),
                             field(i.coverage), field(i.mean_length),
                             field(i.rel_length_vs_cmle_as), std::to_string(i.failures)});
      csv.row(row);
    }
  }
}

int cmd_simulate_text(std::string_view config_text, const SimulateOptions& options,
                      std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto scenarios = simulation_scenarios(parse_config(config_text), options);
    std::vector<ScenarioResult> results;
    results.reserve(scenarios.size());
    for (const auto& s : scenarios) results.push_back(run_scenario(s, options.workers));
    write_simulation_csv(results, out);
    return kExitOk;
  });
}

int cmd_simulate(const std::string& config_path, const SimulateOptions& options,
                 std::ostream& out, std::ostream& err) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    err << "error: cannot read config file '" << config_path << "'\n";
    return kExitInput;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return cmd_simulate_text(ss.str(), options, out, err);
}

// sensitivity

std::vector<SensitivityRow> sensitivity_rows(const EstimateRequest& request,
                                             const SensitivityOptions& options) {
  if (options.steps < 1) throw DomainError("sensitivity needs at least one step");
  if (!(options.beta_min >= 0.0 && options.beta_min <= options.beta_max))
    throw DomainError("beta range must satisfy 0 <= beta_min <= beta_max");
  if (request.rates.alpha + options.beta_max >= 1.0)
    throw DomainError("violated assumption 1: alpha + beta < 1 (alpha + beta_max = " +
                      format_double(request.rates.alpha + options.beta_max) + ")");
  check_level(request.level);
  const SurveyCounts counts = request.counts();

  std::vector<SensitivityRow> rows;
  for (int i = 0; i < options.steps; ++i) {
    const double beta =
        options.steps == 1
            ? options.beta_min
            : options.beta_min + (options.beta_max - options.beta_min) * i / (options.steps - 1);
    ErrorRates rates = request.rates;
    rates.beta = beta;
    if (!request.pi0) throw DomainError("missing required field pi0 (official proportion)");
    require_valid_design(*request.pi0, rates);
    const OfficialContext ctx(*request.pi0, rates.alpha0);

    rows.push_back({beta, EstimatorKind::SurveyMLE, survey_mle(counts, rates).point,
                    cp_survey_interval(counts, ctx, rates, request.level, request.clamp)});
    rows.push_back({beta, EstimatorKind::MME, mme(counts, ctx, rates).point,
                    cp_mme_interval(counts, ctx, rates, request.level, request.clamp)});
  }
  return rows;
}

int cmd_sensitivity(const EstimateRequest& request, const SensitivityOptions& options,
                    std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto rows = sensitivity_rows(request, options);
    if (request.partial() && options.beta_max > 0.0)
      err << "warning: partial counts with beta > 0: R10 = 0 is an assumption, not an observation\n";
    switch (request.format) {
      case OutputFormat::Csv: {
        CsvWriter csv(out);
        csv.schema_tag();
        csv.row({"beta", "estimator", "point", "ci_lower", "ci_upper"});
        for (const auto& r : rows)
          csv.row({field(r.beta), std::string(estimator_name(r.kind)), field(r.point),
                   field(r.interval.lower), field(r.interval.upper)});
        break;
      }
      case OutputFormat::Json: {
        auto arr = nlohmann::json::array();
        for (const auto& r : rows)
          arr.push_back({{"beta", r.beta},
                         {"estimator", std::string(estimator_name(r.kind))},
                         {"point", r.point},
                         {"ci_lower", r.interval.lower},
                         {"ci_upper", r.interval.upper},
                         {"method", std::string(interval_name(r.interval.method))},
                         {"level", r.interval.level}});
        out << arr.dump(2) << '\n';
        break;
      }
      case OutputFormat::Text:
        out << pad("beta", 9) << pad("estimator", 12) << pad("estimate", 11) << level_text(request.level)
            << " CI\n";
        for (const auto& r : rows)
          out << pad(percent(r.beta), 9) << pad(std::string(estimator_name(r.kind)), 12)
              << pad(percent(r.point), 11) << ci_text(r.interval) << '\n';
        break;
    }
    return kExitOk;
  });
}

// case study

std::vector<CaseStudySetting> case_study_settings() {
  return {{"no-error", ErrorRates{0.0, 0.0, 0.0}}, {"misclassification", ErrorRates{0.01, 0.10, 0.0}}};
}

std::vector<CaseStudyRow> case_study_rows(const std::vector<double>& multipliers) {
  for (double k : multipliers)
    if (!(k >= 1.0)) throw DomainError("survey multiplier k must be at least 1");

  using D = CaseStudyDataset;
  const SurveyCounts base = SurveyCounts::from_partial(D::n, D::r_star1, D::r11);
  std::vector<CaseStudyRow> rows;

  for (const auto& setting : case_study_settings()) {
    const ErrorRates& rates = setting.rates;
    const OfficialContext ctx(D::pi0, rates.alpha0);

    const PrevalenceEstimate c = conditional_mle(base, ctx, rates);
    CaseStudyRow cmle_row{setting.name, "CMLE-as", std::nullopt, D::n, D::r_star1, c.point, {}};
    const PrevalenceEstimate m = mme(base, ctx, rates);
    CaseStudyRow mme_row{setting.name, "MME-CP", std::nullopt, D::n, D::r_star1, m.point, {}};
    const PrevalenceEstimate s = survey_mle(base, rates);
    CaseStudyRow smle_row{setting.name, "SMLE-CP", std::nullopt, D::n, D::r_star1, s.point, {}};
    for (double level : kCaseStudyLevels) {
      cmle_row.intervals.push_back(asymptotic_interval(c, D::n, level, ctx));
      mme_row.intervals.push_back(cp_mme_interval(base, ctx, rates, level));
      smle_row.intervals.push_back(cp_survey_interval(base, ctx, rates, level));
    }
    rows.push_back(std::move(cmle_row));
    rows.push_back(std::move(mme_row));
    rows.push_back(std::move(smle_row));

    for (double k : multipliers) {
      const auto n_star = static_cast<std::int64_t>(std::ceil(k * static_cast<double>(D::n)));
      const auto r_star =
          static_cast<std::int64_t>(std::ceil(k * static_cast<double>(D::r_star1)));
      const SurveyCounts scaled(n_star, 0, 0, r_star);
      CaseStudyRow row{setting.name, "SMLE-CP", k, n_star, r_star,
                       survey_mle(scaled, rates).point, {}};
      for (double level : kCaseStudyLevels)
        row.intervals.push_back(cp_survey_interval(scaled, ctx, rates, level));
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

int cmd_case_study(const std::vector<double>& multipliers, OutputFormat format, std::ostream& out,
                   std::ostream& err) {
  return guarded(err, [&] {
    const auto rows = case_study_rows(multipliers);
    using D = CaseStudyDataset;
    switch (format) {
      case OutputFormat::Csv: {
        CsvWriter csv(out);
        csv.schema_tag();
        csv.row({"setting", "method", "k", "n", "r_star1", "point", "level", "lower", "upper"});
        for (const auto& r : rows)
          for (const auto& ci : r.intervals)
            csv.row({r.setting, r.method, r.k ? field(*r.k) : std::string(), std::to_string(r.n),
                     std::to_string(r.r_star1), field(r.point), field(ci.level), field(ci.lower),
                     field(ci.upper)});
        break;
      }
      case OutputFormat::Json: {
        nlohmann::json j;
        j["dataset"] = {{"label", std::string(D::label)},
                        {"n", D::n},
                        {"r_star1", D::r_star1},
                        {"r11", D::r11},
                        {"pi0", D::pi0}};
        auto& arr = j["rows"] = nlohmann::json::array();
        for (const auto& r : rows) {
          nlohmann::json row{{"setting", r.setting}, {"method", r.method},
                             {"k", r.k ? nlohmann::json(*r.k) : nlohmann::json(nullptr)},
                             {"n", r.n},           {"r_star1", r.r_star1},
                             {"point", r.point}};
          auto& cis = row["intervals"] = nlohmann::json::array();
          for (const auto& ci : r.intervals)
            cis.push_back({{"level", ci.level}, {"lower", ci.lower}, {"upper", ci.upper}});
          arr.push_back(std::move(row));
        }
        out << j.dump(2) << '\n';
        break;
      }
      case OutputFormat::Text: {
        out << "Prevalence estimation, " << D::label << " (n = " << D::n << ", R*1 = " << D::r_star1
            << ", R11 = " << D::r11 << ", pi0 = " << percent(D::pi0) << ")\n";
        for (const auto& setting : case_study_settings()) {
          out << '\n' << setting.name << ": alpha = " << percent(setting.rates.alpha)
              << ", beta = " << percent(setting.rates.beta)
              << ", alpha0 = " << percent(setting.rates.alpha0) << '\n';
          out << pad("method", 16) << pad("n", 7, false) << pad("R*1", 6, false) << "  "
              << pad("estimate", 10);
          for (double level : kCaseStudyLevels) {
            const std::string head = level_text(level) + " CI";
            out << (level == kCaseStudyLevels[2] ? head : pad(head, 22));
          }
          out << '\n';
          for (const auto& r : rows) {
            if (r.setting != setting.name) continue;
            std::string label = r.method;
            if (r.k) label += " k=" + format_double(*r.k);
            out << pad(label, 16) << pad(std::to_string(r.n), 7, false)
                << pad(std::to_string(r.r_star1), 6, false) << "  " << pad(percent(r.point), 10);
            for (std::size_t i = 0; i < r.intervals.size(); ++i)
              out << (i + 1 < r.intervals.size() ? pad(ci_text(r.intervals[i]), 22)
                                                 : ci_text(r.intervals[i]));
            out << '\n';
          }
        }
        break;
      }
    }
    return kExitOk;
  });
}

}  // namespace cape::cli
