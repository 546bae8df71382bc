#include "vru/avoidance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/Dense>

#include "vru/error.hpp"
#include "vru/special.hpp"

namespace vru {

namespace {

constexpr double kClip = 1e-6;
constexpr int kMaxCurveIterations = 200;
constexpr double kStepTolerance = 1e-10;

struct Scaling {
  double center = 0.0;
  double scale = 1.0;
};

Scaling scaling_of(const std::vector<double>& xs) {
  Scaling s;
  for (double x : xs) s.center += x;
  s.center /= static_cast<double>(xs.size());
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::abs(x - s.center));
  s.scale = m > 0.0 ? m : 1.0;
  return s;
}

std::size_t distinct_count(const std::vector<double>& xs) {
  return std::set<double>(xs.begin(), xs.end()).size();
}

double logistic_ssr(const std::vector<double>& us, const std::vector<double>& ys, double g0,
                    double g1) {
  double ssr = 0.0;
  for (std::size_t i = 0; i < us.size(); ++i) {
    const double r = ys[i] - logistic(g0 + g1 * us[i]);
    ssr += r * r;
  }
  return ssr;
}

CurveCoeffs unscale_logistic(double g0, double g1, const Scaling& s) {
  const double b1 = g1 / s.scale;
  return {g0 - b1 * s.center, b1, 0.0};
}

}  // namespace

BetaParams prior_from_counts(double avoided, double not_avoided) {
  if (avoided < 0.0 || not_avoided < 0.0) {
    throw EmptyGroupError("negative simulation counts");
  }
  if (avoided == 0.0 && not_avoided == 0.0) {
    throw EmptyGroupError("speed group has no simulated crashes");
  }
  return {avoided == 0.0 ? kCountFloor : avoided,
          not_avoided == 0.0 ? kCountFloor : not_avoided};
}

std::map<double, SimCounts> sim_counts_by_speed(const std::vector<CrashRecord>& crashes,
                                                const std::vector<SimOutcome>& outcomes) {
  if (crashes.size() != outcomes.size()) {
    throw MismatchError("crash and outcome counts differ (" + std::to_string(crashes.size()) +
                        " vs " + std::to_string(outcomes.size()) + ")");
  }
  std::map<double, SimCounts> out;
  for (std::size_t i = 0; i < crashes.size(); ++i) {
    if (crashes[i].id != outcomes[i].crash_id) {
      throw MismatchError("outcome " + outcomes[i].crash_id + " does not match crash " +
                          crashes[i].id);
    }
    auto& c = out[crashes[i].car_speed_init_kmh];
    if (outcomes[i].avoided) ++c.avoided; else ++c.not_avoided;
  }
  return out;
}

std::map<double, BetaParams> prior_from_sims(const std::vector<CrashRecord>& crashes,
                                             const std::vector<SimOutcome>& outcomes) {
  std::map<double, BetaParams> out;
  for (const auto& [speed, c] : sim_counts_by_speed(crashes, outcomes)) {
    out[speed] = prior_from_counts(c.avoided, c.not_avoided);
  }
  return out;
}

BetaParams bayes_update(BetaParams prior, int n_tests, int sum_y, double w) {
  if (w < 0.0) throw ConfigError("w must be >= 0");
  return {prior.a + w * sum_y, prior.b + w * (n_tests - sum_y)};
}

BetaParams bayes_update(BetaParams prior, const std::vector<TestObservation>& tests,
                        double w) {
  int sum_y = 0;
  for (const auto& t : tests) sum_y += t.avoided ? 1 : 0;
  return bayes_update(prior, static_cast<int>(tests.size()), sum_y, w);
}

double beta_cdf(const BetaParams& p, double x) { return incomplete_beta(x, p.a, p.b); }

double beta_mean(const BetaParams& p) noexcept { return p.a / (p.a + p.b); }

double beta_quantile(const BetaParams& p, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("beta_quantile: q must lie in (0, 1)");
  double lo = 0.0;
  double hi = 1.0;
  double x = beta_mean(p);
  for (int it = 0; it < 400; ++it) {
    const double f = beta_cdf(p, x) - q;
    if (f == 0.0) return x;
    if (f < 0.0) lo = x; else hi = x;
    if (hi - lo < 1e-15) break;
    const double density = std::exp(beta_log_density(x, p.a, p.b));
    double next = density > 0.0 && std::isfinite(density) ? x - f / density : -1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) < 1e-16) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

Interval wilson_interval(double successes, double total, double z) {
  const double p = successes / total;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / total;
  const double center = (p + z2 / (2.0 * total)) / denom;
  const double half =
      z / denom * std::sqrt(p * (1.0 - p) / total + z2 / (4.0 * total * total));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

FrequentistEstimate frequentist_estimate(BetaParams prior, int n_tests, int sum_y, double w) {
  const BetaParams pooled = bayes_update(prior, n_tests, sum_y, w);
  const double total = pooled.a + pooled.b;
  if (!(total > 0.0)) throw EmptyGroupError("no pooled observations");
  FrequentistEstimate e;
  e.p_hat = beta_mean(pooled);
  e.wilson90 = wilson_interval(pooled.a, total, normal_quantile(0.95));
  return e;
}

std::vector<SpeedBin> build_speed_bins(const std::map<double, SimCounts>& sims,
                                       const std::vector<TestObservation>& tests, double w,
                                       StatisticalMode mode, QuantileLevels q) {
  struct TestTally {
    int n = 0;
    int sum_y = 0;
  };
  std::map<double, TestTally> by_speed;
  for (const auto& t : tests) {
    auto& tally = by_speed[t.car_speed_init_kmh];
    ++tally.n;
    tally.sum_y += t.avoided ? 1 : 0;
  }

  std::map<double, SpeedBin> bins;
  for (const auto& [speed, counts] : sims) {
    auto& bin = bins[speed];
    bin.car_speed_init = speed;
    bin.sims = counts;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [test_speed, tally] : by_speed) {
      const double d = std::abs(speed - test_speed);
      if (d <= kSpeedMatchWindow && d < best) {
        best = d;
        bin.n_tests = tally.n;
        bin.sum_y = tally.sum_y;
      }
    }
  }

  const double z = normal_quantile(q.high);
  std::vector<SpeedBin> out;
  out.reserve(bins.size());
  for (auto& [speed, bin] : bins) {
    bin.prior = prior_from_counts(bin.sims.avoided, bin.sims.not_avoided);
    bin.posterior = bayes_update(bin.prior, bin.n_tests, bin.sum_y, w);
    if (mode == StatisticalMode::kBayesian) {
      bin.p_median = beta_quantile(bin.posterior, 0.5);
      bin.p_lower = beta_quantile(bin.posterior, q.low);
      bin.p_upper = beta_quantile(bin.posterior, q.high);
    } else {
      bin.p_median = beta_mean(bin.posterior);
      const Interval iv =
          wilson_interval(bin.posterior.a, bin.posterior.a + bin.posterior.b, z);
      bin.p_lower = iv.low;
      bin.p_upper = iv.high;
    }
    out.push_back(bin);
  }
  return out;
}

CurveFit fit_logistic(const std::vector<double>& speeds, const std::vector<double>& ys) {
  if (speeds.size() != ys.size() || speeds.empty()) {
    throw DegenerateFitError("logistic fit needs matching, non-empty inputs");
  }
  if (distinct_count(speeds) < 2) {
    throw DegenerateFitError("logistic fit needs at least 2 distinct speeds");
  }
  const Scaling s = scaling_of(speeds);
  const std::size_t n = speeds.size();
  std::vector<double> us(n);
  for (std::size_t i = 0; i < n; ++i) us[i] = (speeds[i] - s.center) / s.scale;

  // Start from a straight-line fit on the logit scale.
  double su = 0, sz = 0, suu = 0, suz = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = logit(std::clamp(ys[i], kClip, 1.0 - kClip));
    su += us[i];
    sz += z;
    suu += us[i] * us[i];
    suz += us[i] * z;
  }
  const double dn = static_cast<double>(n);
  double g1 = (dn * suz - su * sz) / (dn * suu - su * su);
  double g0 = (sz - g1 * su) / dn;
  double ssr = logistic_ssr(us, ys, g0, g1);
  double lambda = 1e-3;

  for (int it = 1; it <= kMaxCurveIterations; ++it) {
    double a00 = 0, a01 = 0, a11 = 0, r0 = 0, r1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = logistic(g0 + g1 * us[i]);
      const double d = p * (1.0 - p);
      const double r = ys[i] - p;
      a00 += d * d;
      a01 += d * d * us[i];
      a11 += d * d * us[i] * us[i];
      r0 += d * r;
      r1 += d * r * us[i];
    }
    const double det = a00 * a11 - a01 * a01;
    if (det > 0.0) {
      const double gn0 = (a11 * r0 - a01 * r1) / det;
      const double gn1 = (a00 * r1 - a01 * r0) / det;
      if (std::max(std::abs(gn0), std::abs(gn1)) < kStepTolerance) {
        return {unscale_logistic(g0, g1, s), ssr, it};
      }
    }
    bool improved = false;
    while (lambda < 1e16) {
      const double m00 = a00 * (1.0 + lambda) + 1e-300;
      const double m11 = a11 * (1.0 + lambda) + 1e-300;
      const double dm = m00 * m11 - a01 * a01;
      const double d0 = (m11 * r0 - a01 * r1) / dm;
      const double d1 = (m00 * r1 - a01 * r0) / dm;
      const double trial = logistic_ssr(us, ys, g0 + d0, g1 + d1);
      if (trial <= ssr) {
        g0 += d0;
        g1 += d1;
        const bool flat = trial == ssr;
        ssr = trial;
        lambda = std::max(lambda * 0.1, 1e-12);
        improved = true;
        if (flat && std::max(std::abs(d0), std::abs(d1)) < kStepTolerance) {
          return {unscale_logistic(g0, g1, s), ssr, it};
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) {
      // No descent direction left at machine precision.
      return {unscale_logistic(g0, g1, s), ssr, it};
    }
  }
  const CurveCoeffs best = unscale_logistic(g0, g1, s);
  throw NonConvergenceError("logistic avoidance curve did not converge in 200 iterations",
                            {best[0], best[1]});
}

CurveFit fit_poly2(const std::vector<double>& speeds, const std::vector<double>& ys) {
  if (speeds.size() != ys.size() || distinct_count(speeds) < 3) {
    throw DegenerateFitError("quadratic fit needs at least 3 distinct speeds");
  }
  const Scaling s = scaling_of(speeds);
  const auto n = static_cast<Eigen::Index>(speeds.size());
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = (speeds[static_cast<std::size_t>(i)] - s.center) / s.scale;
    x(i, 0) = 1.0;
    x(i, 1) = u;
    x(i, 2) = u * u;
    y(i) = ys[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector3d d = x.colPivHouseholderQr().solve(y);
  const double m = s.center;
  const double sc = s.scale;
  CurveFit fit;
  fit.coeffs = {d(0) - d(1) * m / sc + d(2) * m * m / (sc * sc),
                d(1) / sc - 2.0 * d(2) * m / (sc * sc), d(2) / (sc * sc)};
  for (std::size_t i = 0; i < speeds.size(); ++i) {
    const double r = ys[i] - evaluate_coeffs(CurveForm::kPoly2, fit.coeffs, speeds[i]);
    fit.residual += r * r;
  }
  fit.iterations = 1;
  return fit;
}

namespace {

struct PointColumns {
  std::vector<double> speeds, median, lower, upper;
};

PointColumns columns_of(const std::vector<CurvePoint>& points) {
  PointColumns c;
  for (const auto& p : points) {
    c.speeds.push_back(p.speed);
    c.median.push_back(p.median);
    c.lower.push_back(p.lower);
    c.upper.push_back(p.upper);
  }
  return c;
}

}  // namespace

AvoidanceCurve fit_avoidance_curve(const std::vector<CurvePoint>& points, CurveForm form) {
  const PointColumns c = columns_of(points);
  if (c.speeds.empty()) throw DegenerateFitError("no curve points");
  auto fit = [form](const std::vector<double>& xs, const std::vector<double>& ys) {
    return form == CurveForm::kLogistic ? fit_logistic(xs, ys) : fit_poly2(xs, ys);
  };
  const CurveFit med = fit(c.speeds, c.median);
  const CurveFit lo = fit(c.speeds, c.lower);
  const CurveFit hi = fit(c.speeds, c.upper);
  AvoidanceCurve curve;
  curve.form = form;
  curve.median = med.coeffs;
  curve.lower = lo.coeffs;
  curve.upper = hi.coeffs;
  curve.fit_residual = med.residual + lo.residual + hi.residual;
  curve.speed_min = *std::min_element(c.speeds.begin(), c.speeds.end());
  curve.speed_max = *std::max_element(c.speeds.begin(), c.speeds.end());
  return curve;
}

AvoidanceCurve fit_avoidance_curve_auto(const std::vector<CurvePoint>& points) {
  std::vector<double> speeds;
  for (const auto& p : points) speeds.push_back(p.speed);
  const bool poly_possible = distinct_count(speeds) >= 3;
  std::optional<AvoidanceCurve> logistic_curve;
  try {
    logistic_curve = fit_avoidance_curve(points, CurveForm::kLogistic);
  } catch (const NonConvergenceError&) {
    if (!poly_possible) throw;
  }
  if (!poly_possible) return *logistic_curve;
  const AvoidanceCurve poly = fit_avoidance_curve(points, CurveForm::kPoly2);
  if (!logistic_curve) return poly;
  // Absolute slack so two numerically exact fits never trigger the fallback.
  if (logistic_curve->fit_residual > 3.0 * poly.fit_residual + 1e-12) return poly;
  return *logistic_curve;
}

double evaluate_coeffs(CurveForm form, const CurveCoeffs& c, double v) noexcept {
  if (form == CurveForm::kLogistic) return logistic(c[0] + c[1] * v);
  return std::clamp(c[0] + c[1] * v + c[2] * v * v, 0.0, 1.0);
}

double evaluate(const AvoidanceCurve& curve, double v, Bound bound) noexcept {
  const double med = evaluate_coeffs(curve.form, curve.median, v);
  switch (bound) {
    case Bound::kMedian:
      return med;
    case Bound::kLower:
      return std::min(med, evaluate_coeffs(curve.form, curve.lower, v));
    case Bound::kUpper:
      return std::max(med, evaluate_coeffs(curve.form, curve.upper, v));
  }
  return med;
}

std::vector<CurvePoint> curve_points(const std::vector<SpeedBin>& bins) {
  std::vector<CurvePoint> out;
  out.reserve(bins.size());
  for (const auto& b : bins) out.push_back({b.car_speed_init, b.p_median, b.p_lower, b.p_upper});
  return out;
}

AvoidanceModel build_avoidance_model(UseCase uc, Algorithm algorithm,
                                     const std::vector<CrashRecord>& crashes,
                                     const std::vector<SimOutcome>& outcomes,
                                     const std::vector<TestObservation>& tests,
                                     const AvoidanceOptions& options) {
  if (crashes.size() != outcomes.size()) {
    throw MismatchError("crash and outcome counts differ");
  }
  std::vector<CrashRecord> uc_crashes;
  std::vector<SimOutcome> uc_outcomes;
  for (std::size_t i = 0; i < crashes.size(); ++i) {
    if (crashes[i].use_case != uc) continue;
    uc_crashes.push_back(crashes[i]);
    uc_outcomes.push_back(outcomes[i]);
  }
  if (uc_crashes.empty()) {
    throw EmptyGroupError("no simulated crashes for " + std::string(to_string(uc)));
  }
  std::vector<TestObservation> matched;
  for (const auto& t : tests) {
    if (t.use_case == uc && t.algorithm_family == family_of(algorithm)) matched.push_back(t);
  }
  AvoidanceModel model;
  model.use_case = uc;
  model.algorithm = algorithm;
  model.bins = build_speed_bins(sim_counts_by_speed(uc_crashes, uc_outcomes), matched,
                                options.w, options.mode, options.quantiles);
  const auto points = curve_points(model.bins);
  model.curve = options.form ? fit_avoidance_curve(points, *options.form)
                             : fit_avoidance_curve_auto(points);
  return model;
}

Table avoidance_models_table(const std::vector<AvoidanceModel>& models) {
  Table t;
  t.header = {"use_case", "algorithm", "form", "beta0", "beta1", "c2", "bound"};
  for (const auto& m : models) {
    const std::array<std::pair<Bound, const CurveCoeffs*>, 3> rows = {
        std::pair{Bound::kMedian, &m.curve.median}, std::pair{Bound::kLower, &m.curve.lower},
        std::pair{Bound::kUpper, &m.curve.upper}};
    for (const auto& [bound, c] : rows) {
      const Cell c2 = m.curve.form == CurveForm::kPoly2 ? Cell{(*c)[2]} : Cell{std::string()};
      t.rows.push_back({std::string(to_string(m.use_case)),
                        std::string(to_string(m.algorithm)),
                        std::string(to_string(m.curve.form)), (*c)[0], (*c)[1], c2,
                        std::string(to_string(bound))});
    }
  }
  return t;
}

Table speed_bins_table(const std::vector<AvoidanceModel>& models) {
  Table t;
  t.header = {"use_case", "algorithm", "car_speed_init_kmh", "sim_avoided",
              "sim_not_avoided", "prior_a", "prior_b", "n_tests", "tests_avoided",
              "post_a", "post_b", "p_median", "p_lower", "p_upper"};
  for (const auto& m : models) {
    for (const auto& b : m.bins) {
      t.rows.push_back({std::string(to_string(m.use_case)),
                        std::string(to_string(m.algorithm)), b.car_speed_init,
                        std::int64_t{b.sims.avoided}, std::int64_t{b.sims.not_avoided},
                        b.prior.a, b.prior.b, std::int64_t{b.n_tests}, std::int64_t{b.sum_y},
                        b.posterior.a, b.posterior.b, b.p_median, b.p_lower, b.p_upper});
    }
  }
  return t;
}

}  // namespace vru
