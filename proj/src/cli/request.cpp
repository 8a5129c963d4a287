#include "cape/cli/request.hpp"

#include "cape/errors.hpp"

namespace cape::cli {

std::string_view format_name(OutputFormat f) noexcept {
  switch (f) {
    case OutputFormat::Text: return "text";
    case OutputFormat::Json: return "json";
    case OutputFormat::Csv: return "csv";
  }
  return "?";
}

OutputFormat parse_format(std::string_view name) {
  for (auto f : {OutputFormat::Text, OutputFormat::Json, OutputFormat::Csv})
    if (format_name(f) == name) return f;
  throw DomainError("unknown format '" + std::string(name) + "' (expected text, json or csv)");
}

SurveyCounts EstimateRequest::counts() const {
  if (!n) throw DomainError("missing required count n");
  const bool full = r10.has_value() || r01.has_value();
  if (partial() && full)
    throw DomainError("give either full counts (r11, r10, r01) or partial counts (r-star1, r11), not both");
  if (!r11) throw DomainError("missing required count r11");
  if (partial()) return SurveyCounts::from_partial(*n, *r_star1, *r11);
  if (!r10 || !r01)
    throw DomainError("missing counts: full form needs r11, r10 and r01; partial form needs r-star1 and r11");
  return SurveyCounts(*n, *r11, *r10, *r01);
}

OfficialContext EstimateRequest::context() const {
  if (!pi0) throw DomainError("missing required field pi0 (official proportion)");
  require_valid_design(*pi0, rates);
  return OfficialContext(*pi0, rates.alpha0);
}

std::vector<std::string> EstimateRequest::warnings() const {
  std::vector<std::string> out;
  if (partial() && rates.beta > 0.0)
    out.emplace_back("partial counts with beta > 0: R10 = 0 is an assumption, not an observation");
  return out;
}

std::vector<EstimatorKind> default_estimators(const ErrorRates& rates) {
  std::vector<EstimatorKind> out{EstimatorKind::SurveyMLE, EstimatorKind::ConditionalMLE,
                                 EstimatorKind::MarginalMLE, EstimatorKind::MME};
  if (rates.alpha0 > 0.0) out.push_back(EstimatorKind::OptimalGMM);
  return out;
}

std::vector<IntervalMethod> default_intervals() {
  return {IntervalMethod::CpRstar1, IntervalMethod::CpR01, IntervalMethod::AsymptoticCmle,
          IntervalMethod::AsymptoticMmle};
}

EstimateRequest EstimateRequest::resolved() const {
  EstimateRequest r = *this;
  if (r.estimators.empty()) r.estimators = default_estimators(r.rates);
  if (r.no_intervals) r.intervals.clear();
  else if (r.intervals.empty()) r.intervals = default_intervals();
  return r;
}

nlohmann::json to_json(const EstimateRequest& req) {
  nlohmann::json counts;
  if (req.n) counts["n"] = *req.n;
  if (req.r11) counts["r11"] = *req.r11;
  if (req.r10) counts["r10"] = *req.r10;
  if (req.r01) counts["r01"] = *req.r01;
  if (req.r_star1) counts["r_star1"] = *req.r_star1;

  nlohmann::json j;
  j["counts"] = counts;
  j["pi0"] = req.pi0 ? nlohmann::json(*req.pi0) : nlohmann::json(nullptr);
  j["rates"] = {{"alpha", req.rates.alpha}, {"beta", req.rates.beta}, {"alpha0", req.rates.alpha0}};
  auto& est = j["estimators"] = nlohmann::json::array();
  for (auto k : req.estimators) est.push_back(std::string(estimator_name(k)));
  auto& ci = j["intervals"] = nlohmann::json::array();
  for (auto m : req.intervals) ci.push_back(std::string(interval_name(m)));
  j["no_intervals"] = req.no_intervals;
  if (req.cell) j["cell"] = *req.cell;
  if (req.pilot) j["pilot"] = *req.pilot;
  j["level"] = req.level;
  j["clamp"] = req.clamp;
  return j;
}

EstimateRequest request_from_json(const nlohmann::json& input) {
  const nlohmann::json& j = input.contains("request") ? input.at("request") : input;
  if (!j.is_object()) throw DomainError("request JSON must be an object");
  EstimateRequest r;
  try {
    if (j.contains("counts")) {
      const auto& c = j.at("counts");
      for (auto& [key, value] : c.items()) {
        const auto v = value.get<std::int64_t>();
        if (key == "n") r.n = v;
        else if (key == "r11") r.r11 = v;
        else if (key == "r10") r.r10 = v;
        else if (key == "r01") r.r01 = v;
        else if (key == "r_star1") r.r_star1 = v;
        else throw DomainError("unknown counts key '" + key + "'");
      }
    }
    if (j.contains("pi0") && !j.at("pi0").is_null()) r.pi0 = j.at("pi0").get<double>();
    if (j.contains("rates")) {
      const auto& rt = j.at("rates");
      r.rates.alpha = rt.value("alpha", 0.0);
      r.rates.beta = rt.value("beta", 0.0);
      r.rates.alpha0 = rt.value("alpha0", 0.0);
    }
    if (j.contains("estimators"))
      for (const auto& e : j.at("estimators")) r.estimators.push_back(parse_estimator(e.get<std::string>()));
    if (j.contains("intervals"))
      for (const auto& m : j.at("intervals")) r.intervals.push_back(parse_interval(m.get<std::string>()));
    r.no_intervals = j.value("no_intervals", false);
    if (j.contains("cell")) r.cell = j.at("cell").get<int>();
    if (j.contains("pilot")) r.pilot = j.at("pilot").get<double>();
    r.level = j.value("level", 0.95);
    r.clamp = j.value("clamp", false);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed request JSON: ") + e.what());
  }
  return r;
}

}  // namespace cape::cli
