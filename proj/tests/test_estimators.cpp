#include "doctest.h"
#include "support.hpp"

#include "cape/errors.hpp"
#include "cape/estimators.hpp"
#include "cape/model.hpp"

using namespace cape;

namespace {

const SurveyCounts kAustria = SurveyCounts::from_partial(2287, 71, 32);
constexpr double kPi0 = 0.013105;
const ErrorRates kNone{};
const ErrorRates kMis{0.01, 0.10, 0.0};

}  // namespace

TEST_CASE("survey MLE") {
  CHECK(survey_mle(kAustria, kNone).point == doctest::Approx(71.0 / 2287).epsilon(1e-15));
  CHECK(survey_mle(kAustria, kMis).point == doctest::Approx(0.0236460).epsilon(1e-6));
  CHECK(survey_mle(SurveyCounts(100, 0, 0, 0), kNone).point == 0.0);

  const auto below = survey_mle(SurveyCounts(100, 0, 0, 0), kMis);
  CHECK(below.raw == doctest::Approx(-0.01 / 0.89));
  CHECK(below.point == 0.0);
  CHECK(below.at_boundary);

  const auto e = survey_mle(kAustria, kMis);
  CHECK(e.variance == doctest::Approx(oracle::var_survey(e.point, 2287, 0.01, 0.10)).epsilon(1e-13));
}

TEST_CASE("conditional MLE on the Austrian counts") {
  const OfficialContext ctx(kPi0, 0.0);
  const auto none = conditional_mle(kAustria, ctx, kNone);
  CHECK(none.point == doctest::Approx(kPi0 * 2216 / 2255 + 39.0 / 2255).epsilon(1e-13));
  CHECK(std::abs(none.point - 0.0301732) < 1e-6);
  REQUIRE(none.info);
  CHECK(none.variance == doctest::Approx(1.0 / (2287 * *none.info)));

  const auto mis = conditional_mle(kAustria, ctx, kMis);
  CHECK(std::abs(mis.point - 0.0211935) < 1e-6);
  CHECK(mis.point == doctest::Approx(oracle::cmle_closed(39, 2216, {0, kPi0, 0.01, 0.10, 0})).epsilon(1e-13));
}

TEST_CASE("conditional MLE without official cases is the survey proportion") {
  const OfficialContext ctx(0.0, 0.0);
  const auto e = conditional_mle(SurveyCounts(400, 0, 0, 37), ctx, kNone);
  CHECK(e.point == doctest::Approx(37.0 / 400).epsilon(1e-14));
}

TEST_CASE("property: numeric and closed-form CMLE agree when interior") {
  gen::Source src(23);
  int interior = 0;
  for (int i = 0; i < 400; ++i) {
    auto p = src.params(false);
    const std::int64_t n = src.integer(200, 5000);
    const OfficialContext ctx(p.pi0, 0.0);
    const ErrorRates r{p.alpha, p.beta, 0.0};
    const auto t = oracle::tau_affine(p);
    std::array<std::int64_t, 4> k{};
    std::int64_t left = n;
    for (int l = 0; l < 3; ++l) {
      k[l] = std::min<std::int64_t>(left, std::llround(t[l] * n));
      left -= k[l];
    }
    const SurveyCounts c(n, k[0], k[1], k[2]);
    const double closed = oracle::cmle_closed(c.r01(), c.r00(), p);
    if (!(closed > ctx.pi_lower() + 1e-6 && closed < 1 - 1e-6)) continue;
    ++interior;
    const auto num = conditional_mle_numeric(c, ctx, r);
    const auto fast = conditional_mle(c, ctx, r);
    CHECK(std::abs(num.point - closed) < 1e-8);
    CHECK(std::abs(fast.point - closed) < 1e-12);
  }
  CHECK(interior > 100);
}

TEST_CASE("CMLE at the boundary is clamped and flagged") {
  const OfficialContext ctx(0.05, 0.0);
  const SurveyCounts c(1000, 50, 0, 0);  // no new cases
  const auto e = conditional_mle(c, ctx, ErrorRates{0.01, 0.02, 0.0});
  CHECK(e.point == ctx.pi_lower());
  CHECK(e.at_boundary);
  const auto num = conditional_mle_numeric(c, ctx, ErrorRates{0.01, 0.02, 0.0});
  CHECK(num.point == doctest::Approx(ctx.pi_lower()).epsilon(1e-9));
}

TEST_CASE("numeric CMLE with alpha0 > 0 maximizes the likelihood") {
  const OfficialContext ctx(0.03, 0.005);
  const ErrorRates r{0.01, 0.05, 0.005};
  const SurveyCounts c(3000, 80, 9, 120);
  const auto e = conditional_mle(c, ctx, r);
  const double best = log_likelihood(e.point, c, ctx, r);
  for (double d : {-1e-4, -1e-6, 1e-6, 1e-4})
    CHECK(log_likelihood(e.point + d, c, ctx, r) <= best + 1e-12);
}

TEST_CASE("log-likelihood conventions") {
  const OfficialContext ctx(0.0, 0.0);
  // every observation in cell 00, tau00 = 1 at pi = 0
  CHECK(log_likelihood(0.0, SurveyCounts(50, 0, 0, 0), ctx, kNone) == 0.0);
  // R10 observed but tau10 = 0 for every pi when alpha0 = beta = 0
  const SurveyCounts impossible(100, 5, 3, 10);
  const OfficialContext c2(0.05, 0.0);
  for (double pi : {0.05, 0.2, 0.9})
    CHECK(log_likelihood(pi, impossible, c2, kNone) == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(conditional_mle(impossible, c2, kNone), DegenerateError);
}

TEST_CASE("Austrian log-likelihood has a single interior maximum") {
  const OfficialContext ctx(kPi0, 0.0);
  double best = -std::numeric_limits<double>::infinity(), arg = 0.0;
  int turns = 0;
  double prev = -std::numeric_limits<double>::infinity();
  bool rising = true;
  for (double pi = kPi0; pi <= 0.2; pi += 1e-6) {
    const double v = log_likelihood(pi, kAustria, ctx, kNone);
    if (v > best) {
      best = v;
      arg = pi;
    }
    if (rising && v < prev) {
      rising = false;
      ++turns;
    } else if (!rising && v > prev) {
      rising = true;
      ++turns;
    }
    prev = v;
  }
  CHECK(turns == 1);
  CHECK(std::abs(arg - 0.0301732) < 2e-6);
}

TEST_CASE("Fisher information") {
  const OfficialContext ctx(0.1, 0.0);
  CHECK(fisher_information(0.2, ctx, kNone) == doctest::Approx(11.25).epsilon(1e-14));
  CHECK(1.0 / fisher_information(0.2, ctx, kNone) == doctest::Approx(0.0888889).epsilon(1e-6));
  CHECK(1.0 / fisher_information(0.3, OfficialContext(0.0, 0.0), kNone) ==
        doctest::Approx(0.3 * 0.7).epsilon(1e-14));

  const oracle::Params p{0.05, kPi0, 0.01, 0.10, 0.0};
  const double closed = fisher_information(0.05, OfficialContext(kPi0, 0.0), kMis);
  CHECK(closed == doctest::Approx(oracle::fisher_four_term(p)).epsilon(1e-12));
  CHECK(std::abs(closed - oracle::fisher_numeric(p)) / closed < 1e-6);
}

TEST_CASE("property: Fisher information equals the four-term form and the numeric Hessian") {
  gen::Source src(29);
  for (int i = 0; i < 2000; ++i) {
    auto p = src.params();
    const double lo = p.pi_lower();
    p.pi = src.uniform(lo + 0.01 * (1 - lo), 1 - 0.01 * (1 - lo));
    const OfficialContext ctx(p.pi0, p.alpha0);
    const ErrorRates r{p.alpha, p.beta, p.alpha0};
    const double got = fisher_information(p.pi, ctx, r);
    CHECK(got == doctest::Approx(oracle::fisher_four_term(p)).epsilon(1e-10));
    CHECK(std::abs(got - oracle::fisher_numeric(p, 0.05 * std::min(p.pi - lo, 1 - p.pi))) / got < 1e-6);
  }
}

TEST_CASE("marginal MLE") {
  const OfficialContext ctx(kPi0, 0.0);
  const auto mm = marginal_mle(32, 39, 2287, ctx, kNone);
  const auto cm = conditional_mle(kAustria, ctx, kNone);
  CHECK(std::abs(mm.point - cm.point) < 5e-3);
  REQUIRE(mm.info);
  CHECK(*mm.info > 0.0);

  const auto binom = marginal_mle(0, 57, 1000, OfficialContext(0.0, 0.0), kNone);
  CHECK(binom.point == doctest::Approx(0.057).epsilon(1e-8));

  const auto edge = marginal_mle(20, 0, 1000, OfficialContext(0.03, 0.0), kNone);
  CHECK(edge.point == doctest::Approx(0.03).epsilon(1e-12));
  CHECK(edge.at_boundary);
}

TEST_CASE("MME and per-cell MME") {
  const OfficialContext ctx(kPi0, 0.0);
  CHECK(mme(kAustria, ctx, kNone).point == doctest::Approx(kPi0 + 39.0 / 2287).epsilon(1e-14));
  CHECK(std::abs(mme(kAustria, ctx, kNone).point - 0.0301579) < 1e-6);
  CHECK(std::abs(mme(kAustria, ctx, kMis).point - 0.0211769) < 1e-6);
  CHECK(mme(kAustria, ctx, kMis).point ==
        doctest::Approx((39.0 / 2287 + kPi0 * 0.9 - 0.01) / 0.89).epsilon(1e-14));
  CHECK(mme(SurveyCounts(500, 10, 0, 0), OfficialContext(0.02, 0.0), kNone).point == 0.02);

  CHECK_THROWS_AS(cell_mme(Cell::k11, kAustria, ctx, kNone), DegenerateError);
  CHECK_THROWS_AS(cell_mme(Cell::k10, kAustria, ctx, kNone), DegenerateError);

  gen::Source src(31);
  for (int i = 0; i < 500; ++i) {
    const auto p = src.params();
    const OfficialContext cx(p.pi0, p.alpha0);
    const ErrorRates r{p.alpha, p.beta, p.alpha0};
    const std::int64_t n = src.integer(1, 5000);
    const std::int64_t r01 = src.integer(0, n);
    const SurveyCounts c(n, 0, 0, r01);
    const auto a = mme(c, cx, r);
    const auto b = cell_mme(Cell::k01, c, cx, r);
    CHECK(a.raw == b.raw);
    CHECK(a.point == b.point);
    CHECK(a.raw == doctest::Approx(oracle::mme(n, r01, p)).epsilon(1e-12));
  }
}

TEST_CASE("cell 00 MME inverts its own expectation") {
  const oracle::Params p{0.05, kPi0, 0.01, 0.10, 0.0};
  const auto t = oracle::tau_affine(p);
  // n large so R00 / n = tau00 up to one count
  const std::int64_t n = 10'000'000;
  const auto r00 = std::llround(t[3] * n);
  const SurveyCounts c(n, 0, 0, n - r00);
  const auto e = cell_mme(Cell::k00, c, OfficialContext(kPi0, 0.0), kMis);
  CHECK(std::abs(e.raw - 0.05) < 2.0 / (n * 0.89));
}

TEST_CASE("MME variance") {
  const oracle::Params p{0.05, kPi0, 0.01, 0.10, 0.0};
  CHECK(mme_variance(0.05, 2000, OfficialContext(kPi0, 0.0), kMis) ==
        doctest::Approx(oracle::var_mme(p, 2000)).epsilon(1e-13));
  CHECK(survey_mle_variance(0.05, 2000, kMis) ==
        doctest::Approx(oracle::var_survey(0.05, 2000, 0.01, 0.10)).epsilon(1e-13));
}

TEST_CASE("GMM weights match the printed optimum") {
  gen::Source src(37);
  for (int i = 0; i < 1000; ++i) {
    auto p = src.params();
    if (p.alpha0 == 0.0) p.alpha0 = 0.001;
    if (p.pi0 < p.alpha0) p.pi0 = p.alpha0 + 0.01;
    const double lo = p.pi_lower();
    p.pi = src.uniform(lo + 1e-3, 0.999);
    const auto t = oracle::tau_affine(p);
    if (*std::min_element(t.begin(), t.end()) <= 0.0) continue;
    const GmmWeights w = gmm_weights(p.pi, OfficialContext(p.pi0, p.alpha0),
                                     ErrorRates{p.alpha, p.beta, p.alpha0});
    const auto ref = oracle::gmm_weights(p);
    CHECK(std::abs(w.gamma1 + w.gamma2 + w.gamma3 - 1.0) < 1e-10);
    CHECK(w.gamma1 == doctest::Approx(ref[0]).epsilon(1e-10));
    CHECK(w.gamma2 == doctest::Approx(ref[1]).epsilon(1e-10));
    CHECK(w.gamma3 == doctest::Approx(ref[2]).epsilon(1e-10));
    CHECK(w.lambda == doctest::Approx(ref[3]).epsilon(1e-10));
  }
}

TEST_CASE("GMM variance equals the printed six-term expression and beats the MME") {
  const OfficialContext ctx(kPi0, 0.001);
  const ErrorRates r{0.01, 0.10, 0.001};
  const oracle::Params p{0.05, kPi0, 0.01, 0.10, 0.001};
  const GmmWeights w = gmm_weights(0.05, ctx, r);
  const double v = gmm_variance(w, 0.05, 2000, ctx, r);
  CHECK(v == doctest::Approx(oracle::gmm_variance(p, w.gamma1, w.gamma2, w.gamma3, 2000)).epsilon(1e-10));
  CHECK(v <= mme_variance(0.05, 2000, ctx, r));

  // the optimum is a minimum along the constraint
  for (double e : {-1e-3, 1e-3}) {
    CHECK(oracle::gmm_variance(p, w.gamma1 + e, w.gamma2, w.gamma3 - e, 2000) >= v);
    CHECK(oracle::gmm_variance(p, w.gamma1, w.gamma2 + e, w.gamma3 - e, 2000) >= v);
  }
}

TEST_CASE("GMM falls back to the MME when alpha0 = 0") {
  const OfficialContext ctx(kPi0, 0.0);
  const auto g = optimal_gmm(kAustria, ctx, kMis);
  CHECK(g.estimate.kind == EstimatorKind::OptimalGMM);
  CHECK(g.estimate.point == mme(kAustria, ctx, kMis).point);
  CHECK(g.weights.gamma1 == 0.0);
  CHECK(g.weights.gamma2 == 0.0);
  CHECK(g.weights.gamma3 == 1.0);
  CHECK_THROWS_AS(gmm_weights(0.05, ctx, kMis), DegenerateError);
}

TEST_CASE("GMM at small alpha0 differs from the MME by a control-variate term") {
  // With alpha0 -> 0 the optimal weights tend to (a, -a, 1) * alpha0 scale on
  // cells 11 and 10, which leaves
  //   gmm - mme -> ((R11 + R10)/n - pi0) * tau01 / (Delta (tau00 + tau01)).
  // The term has mean zero but does not vanish for observed counts.
  const double a0 = 1e-8;
  const OfficialContext ctx(kPi0, a0);
  const ErrorRates r{0.01, 0.10, a0};
  const SurveyCounts c(2287, 30, 3, 40);
  const auto g = optimal_gmm(c, ctx, r);
  const auto m = mme(c, ctx, r);
  const oracle::Params p{m.point, kPi0, 0.01, 0.10, a0};
  const auto t = oracle::tau_affine(p);
  const double term = ((30.0 + 3.0) / 2287 - kPi0) * t[2] / (0.89 * (t[3] + t[2]));
  CHECK(std::abs((g.estimate.raw - m.raw) - term) < 1e-6 * std::abs(term) + 1e-9);
  CHECK(std::abs(g.estimate.raw - m.raw) > 1e-6);

  // when the official column matches pi0 the term vanishes
  const auto r_match = std::llround(kPi0 * 1'000'000);
  const SurveyCounts at_pi0(1'000'000, r_match, 0, 40'000);
  const OfficialContext ctx2(static_cast<double>(r_match) / 1'000'000, a0);
  const auto g2 = optimal_gmm(at_pi0, ctx2, r);
  CHECK(std::abs(g2.estimate.raw - mme(at_pi0, ctx2, r).raw) < 1e-6);
}

TEST_CASE("GMM pilot must be interior") {
  const OfficialContext ctx(0.02, 0.001);
  const ErrorRates r{0.01, 0.05, 0.001};
  const SurveyCounts c(2000, 40, 2, 50);
  CHECK_NOTHROW(optimal_gmm(c, ctx, r, 0.05));
  CHECK_THROWS_AS(optimal_gmm(c, ctx, r, ctx.pi_lower()), DomainError);
  CHECK_THROWS_AS(optimal_gmm(c, ctx, r, 1.0), DomainError);
}

TEST_CASE("estimator names round-trip") {
  for (auto k : {EstimatorKind::SurveyMLE, EstimatorKind::ConditionalMLE, EstimatorKind::MarginalMLE,
                 EstimatorKind::MME, EstimatorKind::CellMME, EstimatorKind::OptimalGMM})
    CHECK(parse_estimator(estimator_name(k)) == k);
  CHECK_THROWS_AS(parse_estimator("nope"), DomainError);
}
