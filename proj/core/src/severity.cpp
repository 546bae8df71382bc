#include "vru/severity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <tuple>

#include <Eigen/Dense>

#include "vru/error.hpp"
#include "vru/special.hpp"

namespace vru {

namespace {

constexpr double kInterval90 = 1.645;
constexpr int kMaxNewtonIterations = 200;

std::string format_coefficient(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

struct Collisions {
  std::vector<CrashRecord> crashes;
  std::vector<double> speeds;
};

Collisions collisions_of(const std::vector<CrashRecord>& crashes,
                         const std::vector<SimOutcome>& outcomes) {
  if (crashes.size() != outcomes.size()) {
    throw MismatchError("crash and outcome counts differ");
  }
  Collisions c;
  for (std::size_t i = 0; i < crashes.size(); ++i) {
    if (crashes[i].id != outcomes[i].crash_id) {
      throw MismatchError("outcome " + outcomes[i].crash_id + " does not match crash " +
                          crashes[i].id);
    }
    if (outcomes[i].avoided) continue;
    c.crashes.push_back(crashes[i]);
    c.speeds.push_back(outcomes[i].collision_speed_kmh);
  }
  return c;
}

}  // namespace

std::string column_name(const DesignColumn& column) {
  std::string name(to_string(column.covariate));
  if (column.level < 0) return name;
  if (column.covariate == Covariate::kSightObstruction) {
    return name + "=" + std::string(to_string(static_cast<SightObstruction>(column.level)));
  }
  return name + "=" + std::string(to_string(static_cast<Location>(column.level)));
}

double column_value(const DesignColumn& column, const CrashRecord& crash) noexcept {
  switch (column.covariate) {
    case Covariate::kCarSpeedInit:
      return crash.car_speed_init_kmh;
    case Covariate::kVruSpeedInit:
      return crash.vru_speed_init_kmh;
    case Covariate::kLongDist:
      return crash.long_dist_m;
    case Covariate::kLatDist:
      return crash.lat_dist_m;
    case Covariate::kSightObstruction:
      return static_cast<int>(crash.sight_obstruction) == column.level ? 1.0 : 0.0;
    case Covariate::kLocation:
      return static_cast<int>(crash.location) == column.level ? 1.0 : 0.0;
  }
  return 0.0;
}

std::vector<DesignColumn> design_columns(const std::vector<Covariate>& subset,
                                         const std::vector<CrashRecord>& data) {
  std::vector<DesignColumn> out;
  auto add_dummies = [&](Covariate cov, int levels) {
    for (int level = 1; level < levels; ++level) {
      const DesignColumn col{cov, level};
      bool seen0 = false;
      bool seen1 = false;
      for (const auto& c : data) {
        (column_value(col, c) != 0.0 ? seen1 : seen0) = true;
      }
      if (seen0 && seen1) out.push_back(col);
    }
  };
  for (Covariate cov : subset) {
    switch (cov) {
      case Covariate::kSightObstruction:
        add_dummies(cov, static_cast<int>(enum_count<SightObstruction>()));
        break;
      case Covariate::kLocation:
        add_dummies(cov, static_cast<int>(enum_count<Location>()));
        break;
      default:
        out.push_back({cov, -1});
    }
  }
  return out;
}

Collinearity check_collinearity(const Eigen::MatrixXd& columns) {
  Collinearity r;
  const auto n = columns.rows();
  const auto k = columns.cols();
  if (k == 0) return r;
  if (n < 2) {
    r.ok = false;
    r.max_vif = r.condition = std::numeric_limits<double>::infinity();
    return r;
  }
  Eigen::MatrixXd z = columns.rowwise() - columns.colwise().mean();
  for (Eigen::Index j = 0; j < k; ++j) {
    const double sd = std::sqrt(z.col(j).squaredNorm() / static_cast<double>(n - 1));
    if (!(sd > 0.0)) {
      r.ok = false;
      r.max_vif = r.condition = std::numeric_limits<double>::infinity();
      return r;
    }
    z.col(j) /= sd;
  }
  if (k == 1) return r;
  const Eigen::MatrixXd corr = z.transpose() * z / static_cast<double>(n - 1);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  if (!(lmin > lmax * 1e-14)) {
    r.ok = false;
    r.max_vif = r.condition = std::numeric_limits<double>::infinity();
    return r;
  }
  r.condition = std::sqrt(lmax / lmin);
  const Eigen::MatrixXd inv = eig.eigenvectors() *
                              eig.eigenvalues().cwiseInverse().asDiagonal() *
                              eig.eigenvectors().transpose();
  r.max_vif = inv.diagonal().maxCoeff();
  r.ok = r.max_vif <= kMaxVif && r.condition <= kMaxCondition;
  return r;
}

double speed_model_aic(int n, double rss, int n_coefficients) noexcept {
  const double dn = static_cast<double>(n);
  return dn * std::log(std::max(rss, kRssFloor) / dn) + 2.0 * (n_coefficients + 1);
}

SpeedModel fit_speed_model(const std::vector<CrashRecord>& crashes,
                           const std::vector<SimOutcome>& outcomes) {
  const Collisions data = collisions_of(crashes, outcomes);
  const int n = static_cast<int>(data.speeds.size());
  if (n < kMinCollisions) {
    throw TooFewCollisionsError(std::to_string(n) + " collisions, at least " +
                                std::to_string(kMinCollisions) + " required");
  }
  const Eigen::Map<const Eigen::VectorXd> y(data.speeds.data(), n);
  constexpr int kCovariates = static_cast<int>(enum_count<Covariate>());

  SpeedModel best;
  bool have_best = false;
  std::vector<int> best_indices;
  for (unsigned mask = 0; mask < (1u << kCovariates); ++mask) {
    std::vector<Covariate> subset;
    std::vector<int> indices;
    for (int j = 0; j < kCovariates; ++j) {
      if (mask & (1u << j)) {
        subset.push_back(static_cast<Covariate>(j));
        indices.push_back(j);
      }
    }
    const auto cols = design_columns(subset, data.crashes);
    const int k = static_cast<int>(cols.size()) + 1;
    if (k > n) continue;
    Eigen::MatrixXd x(n, k);
    for (int i = 0; i < n; ++i) {
      x(i, 0) = 1.0;
      for (int j = 1; j < k; ++j) {
        x(i, j) = column_value(cols[static_cast<std::size_t>(j - 1)],
                               data.crashes[static_cast<std::size_t>(i)]);
      }
    }
    if (!check_collinearity(x.rightCols(k - 1)).ok) continue;
    const auto qr = x.colPivHouseholderQr();
    if (qr.rank() < k) continue;
    const Eigen::VectorXd beta = qr.solve(y);
    const double rss = (y - x * beta).squaredNorm();
    const double aic = speed_model_aic(n, rss, k);

    // Lowest AIC, then fewer covariates, then lexicographic covariate indices.
    bool take = !have_best;
    if (have_best) {
      const auto cand = std::make_tuple(aic, subset.size(), indices);
      const auto cur = std::make_tuple(best.aic, best.covariates.size(), best_indices);
      take = cand < cur;
    }
    if (!take) continue;
    have_best = true;
    best_indices = indices;
    best.kind = SpeedModelKind::kRegression;
    best.covariates = subset;
    best.columns = cols;
    best.coefficients.assign(beta.data(), beta.data() + k);
    best.residual_std = n > k ? std::sqrt(rss / (n - k)) : 0.0;
    best.aic = aic;
  }
  best.n_obs = n;
  return best;
}

SpeedModel fit_speed_model_or_fallback(const std::vector<CrashRecord>& crashes,
                                       const std::vector<SimOutcome>& outcomes) {
  const Collisions data = collisions_of(crashes, outcomes);
  const int n = static_cast<int>(data.speeds.size());
  if (n >= kMinCollisions) return fit_speed_model(crashes, outcomes);
  SpeedModel m;
  m.n_obs = n;
  if (n == 0) {
    m.kind = SpeedModelKind::kOriginalSpeed;
    return m;
  }
  m.kind = SpeedModelKind::kInterceptOnly;
  double mean = 0.0;
  for (double v : data.speeds) mean += v;
  mean /= n;
  double rss = 0.0;
  for (double v : data.speeds) rss += (v - mean) * (v - mean);
  m.coefficients = {mean};
  m.residual_std = n > 1 ? std::sqrt(rss / (n - 1)) : 0.0;
  m.aic = speed_model_aic(n, rss, 1);
  return m;
}

double raw_speed_prediction(const SpeedModel& model, const CrashRecord& crash) noexcept {
  if (model.kind == SpeedModelKind::kOriginalSpeed) return crash.orig_collision_speed_kmh;
  double v = model.coefficients.empty() ? 0.0 : model.coefficients[0];
  for (std::size_t j = 0; j < model.columns.size(); ++j) {
    v += model.coefficients[j + 1] * column_value(model.columns[j], crash);
  }
  return v;
}

SpeedPrediction predict_collision_speed(const SpeedModel& model, const CrashRecord& crash) {
  const double cap = crash.car_speed_init_kmh;
  auto clamp_round = [cap](double v) { return std::round(std::clamp(v, 0.0, cap)); };
  SpeedPrediction p;
  p.point = clamp_round(raw_speed_prediction(model, crash));
  if (model.kind == SpeedModelKind::kOriginalSpeed || model.n_obs == 0) {
    p.low = p.high = p.point;
    return p;
  }
  const double leverage =
      static_cast<double>(model.coefficients.size()) / static_cast<double>(model.n_obs);
  const double half = kInterval90 * model.residual_std * std::sqrt(1.0 + leverage);
  p.low = clamp_round(p.point - half);
  p.high = clamp_round(p.point + half);
  return p;
}

Table speed_models_table(const std::vector<SpeedModel>& models) {
  Table t;
  t.header = {"use_case", "algorithm", "covariates", "coefficients", "residual_std", "aic"};
  for (const auto& m : models) {
    std::string covs;
    std::string coefs;
    if (m.kind == SpeedModelKind::kOriginalSpeed) {
      covs = "orig_collision_speed";
    } else {
      for (const auto c : m.covariates) {
        if (!covs.empty()) covs += ';';
        covs += to_string(c);
      }
      if (!m.coefficients.empty()) coefs = "intercept=" + format_coefficient(m.coefficients[0]);
      for (std::size_t j = 0; j < m.columns.size(); ++j) {
        coefs += ";" + column_name(m.columns[j]) + "=" +
                 format_coefficient(m.coefficients[j + 1]);
      }
    }
    t.rows.push_back({std::string(to_string(m.use_case)), std::string(to_string(m.algorithm)),
                      covs, coefs, m.residual_std,
                      m.kind == SpeedModelKind::kOriginalSpeed ? Cell{std::string()}
                                                               : Cell{m.aic}});
  }
  return t;
}

// ---- Injury risk -----------------------------------------------------------

InjuryRiskModel builtin_probit(VruType type) {
  InjuryRiskModel m;
  m.family = IrcFamily::kOrderedProbit;
  m.vru_type = type;
  double deviance = 0.0;
  if (type == VruType::kCyclist) {
    m.beta = 0.03197;
    m.se_beta = 0.002981;
    m.tau1 = 1.3679;
    m.se_tau1 = 0.0732;
    m.tau2 = 3.5633;
    m.se_tau2 = 0.1949;
    deviance = 1426.122;
  } else {
    m.beta = 0.03303;
    m.se_beta = 0.003612;
    m.tau1 = 0.8926;
    m.se_tau1 = 0.1216;
    m.tau2 = 3.2316;
    m.se_tau2 = 0.1973;
    deviance = 829.4574;
  }
  m.log_lik = -deviance / 2.0;
  m.aic = -2.0 * m.log_lik + 2.0 * 3;
  return m;
}

std::array<double, 3> class_probabilities(double beta, double tau1, double tau2, double v) {
  const double a = tau1 - beta * v;
  const double b = tau2 - beta * v;
  const double p0 = normal_cdf(a);
  const double p2 = normal_cdf(-b);
  const double p1 = a > 0.0 ? normal_cdf(-a) - normal_cdf(-b) : normal_cdf(b) - normal_cdf(a);
  return {p0, p1, p2};
}

double injury_risk(const InjuryRiskModel& model, RiskLevel level, double v) {
  if (model.family == IrcFamily::kOrderedProbit) {
    const double tau = level == RiskLevel::kFatal ? model.tau2 : model.tau1;
    return normal_cdf(model.beta * v - tau);
  }
  const auto& sw = model.serious_or_worse;
  const double p_sw = logistic(sw.intercept + sw.slope * v);
  if (level == RiskLevel::kSeriousOrWorse) return p_sw;
  return std::min(p_sw, logistic(model.fatal.intercept + model.fatal.slope * v));
}

ProbitData probit_data(const std::vector<PersonRecord>& persons) {
  ProbitData d;
  d.speed.reserve(persons.size());
  d.cls.reserve(persons.size());
  for (const auto& p : persons) {
    d.speed.push_back(p.collision_speed_kmh);
    d.cls.push_back(static_cast<int>(p.injury));
  }
  return d;
}

namespace {

// phi(x) / Phi(x), finite far into the lower tail.
double mills_inverse(double x) {
  return std::exp(-0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi) - log_normal_cdf(x));
}

void check_binary_separation(const std::vector<double>& speed, const std::vector<bool>& high,
                             const std::string& what) {
  double low_min = std::numeric_limits<double>::infinity();
  double low_max = -low_min;
  double high_min = low_min;
  double high_max = -low_min;
  bool any_low = false;
  bool any_high = false;
  for (std::size_t i = 0; i < speed.size(); ++i) {
    if (high[i]) {
      any_high = true;
      high_min = std::min(high_min, speed[i]);
      high_max = std::max(high_max, speed[i]);
    } else {
      any_low = true;
      low_min = std::min(low_min, speed[i]);
      low_max = std::max(low_max, speed[i]);
    }
  }
  if (!any_low || !any_high) throw SeparationError(what + ": only one outcome class present");
  if (low_max < high_min || high_max < low_min) {
    throw SeparationError(what + ": classes perfectly separated by collision speed");
  }
}

}  // namespace

ProbitEval probit_log_likelihood(const ProbitData& data, const Eigen::Vector3d& theta) {
  const double beta = theta(0);
  const double tau1 = theta(1);
  const double e = std::exp(theta(2));
  const double tau2 = tau1 + e;
  ProbitEval out;
  // Accumulate in (beta, tau1, tau2), then map to (beta, tau1, delta).
  Eigen::Vector3d g = Eigen::Vector3d::Zero();
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < data.speed.size(); ++i) {
    const double v = data.speed[i];
    const double a = tau1 - beta * v;
    const double b = tau2 - beta * v;
    double la = 0, lb = 0, laa = 0, lbb = 0, lab = 0;
    switch (data.cls[i]) {
      case 0: {
        out.log_lik += log_normal_cdf(a);
        const double m = mills_inverse(a);
        la = m;
        laa = -m * (a + m);
        break;
      }
      case 2: {
        out.log_lik += log_normal_cdf(-b);
        const double m = mills_inverse(-b);
        lb = -m;
        lbb = -m * (-b + m);
        break;
      }
      default: {
        const double p =
            a > 0.0 ? normal_cdf(-a) - normal_cdf(-b) : normal_cdf(b) - normal_cdf(a);
        out.log_lik += std::log(p);
        const double fa = normal_pdf(a);
        const double fb = normal_pdf(b);
        la = -fa / p;
        lb = fb / p;
        laa = a * fa / p - la * la;
        lbb = -b * fb / p - lb * lb;
        lab = fa * fb / (p * p);
        break;
      }
    }
    g(0) += -v * (la + lb);
    g(1) += la;
    g(2) += lb;
    h(0, 0) += v * v * (laa + 2.0 * lab + lbb);
    h(0, 1) += -v * (laa + lab);
    h(0, 2) += -v * (lab + lbb);
    h(1, 1) += laa;
    h(1, 2) += lab;
    h(2, 2) += lbb;
  }
  h(1, 0) = h(0, 1);
  h(2, 0) = h(0, 2);
  h(2, 1) = h(1, 2);
  Eigen::Matrix3d j = Eigen::Matrix3d::Identity();
  j(2, 1) = 1.0;
  j(2, 2) = e;
  out.gradient = j.transpose() * g;
  out.hessian = j.transpose() * h * j;
  out.hessian(2, 2) += g(2) * e;
  return out;
}

InjuryRiskModel fit_ordered_probit(const std::vector<PersonRecord>& persons) {
  if (persons.empty()) throw MissingClassError("no person records");
  const VruType type = persons.front().vru_type;
  for (const auto& p : persons) {
    if (p.vru_type != type) {
      throw ValueError(0, "ordered probit fit expects a single vru_type");
    }
  }
  return fit_ordered_probit(probit_data(persons), type);
}

InjuryRiskModel fit_ordered_probit(const ProbitData& data, VruType type) {
  std::array<int, 3> counts{};
  for (int c : data.cls) ++counts[static_cast<std::size_t>(c)];
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      throw MissingClassError("no " + std::string(to_string(static_cast<Injury>(c))) +
                              " records for " + std::string(to_string(type)));
    }
  }
  for (int split = 0; split < 2; ++split) {
    std::vector<bool> high(data.cls.size());
    for (std::size_t i = 0; i < data.cls.size(); ++i) high[i] = data.cls[i] > split;
    check_binary_separation(data.speed, high,
                            split == 0 ? "Slight vs Serious+" : "Fatal vs non-fatal");
  }

  const double n = static_cast<double>(data.cls.size());
  const double q1 = counts[0] / n;
  const double q2 = (counts[0] + counts[1]) / n;
  Eigen::Vector3d theta(0.0, normal_quantile(q1),
                        std::log(normal_quantile(q2) - normal_quantile(q1)));
  ProbitEval cur = probit_log_likelihood(data, theta);
  int it = 0;
  for (; it < kMaxNewtonIterations; ++it) {
    if (cur.gradient.lpNorm<Eigen::Infinity>() < 1e-8) break;
    const Eigen::Matrix3d neg = -cur.hessian;
    double ridge = 0.0;
    Eigen::LLT<Eigen::Matrix3d> llt(neg);
    while (llt.info() != Eigen::Success || !std::isfinite(llt.matrixLLT().sum())) {
      ridge = ridge == 0.0 ? 1e-8 * std::max(1.0, neg.diagonal().cwiseAbs().maxCoeff())
                           : ridge * 10.0;
      llt.compute(neg + ridge * Eigen::Matrix3d::Identity());
    }
    const Eigen::Vector3d step = llt.solve(cur.gradient);
    double t = 1.0;
    bool accepted = false;
    const double slack = 1e-13 * (1.0 + std::abs(cur.log_lik));
    for (int h = 0; h < 60; ++h, t *= 0.5) {
      const Eigen::Vector3d cand = theta + t * step;
      ProbitEval next = probit_log_likelihood(data, cand);
      if (std::isfinite(next.log_lik) && next.log_lik >= cur.log_lik - slack) {
        theta = cand;
        cur = std::move(next);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (cur.gradient.lpNorm<Eigen::Infinity>() >= 1e-8) {
    throw NonConvergenceError("ordered probit did not converge",
                              {theta(0), theta(1), theta(1) + std::exp(theta(2))});
  }
  InjuryRiskModel m;
  m.family = IrcFamily::kOrderedProbit;
  m.vru_type = type;
  m.beta = theta(0);
  m.tau1 = theta(1);
  m.tau2 = theta(1) + std::exp(theta(2));
  const Eigen::Matrix3d cov = (-cur.hessian).inverse();
  const double e = std::exp(theta(2));
  m.se_beta = std::sqrt(cov(0, 0));
  m.se_tau1 = std::sqrt(cov(1, 1));
  m.se_tau2 = std::sqrt(cov(1, 1) + e * e * cov(2, 2) + 2.0 * e * cov(1, 2));
  m.log_lik = cur.log_lik;
  m.aic = -2.0 * m.log_lik + 2.0 * 3;
  m.n_obs = static_cast<int>(data.cls.size());
  m.iterations = it;
  m.negative_slope = m.beta < 0.0;
  return m;
}

LogisticCurve fit_logistic_curve(const std::vector<double>& speed, const std::vector<int>& y) {
  std::vector<bool> high(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) high[i] = y[i] != 0;
  check_binary_separation(speed, high, "logistic injury risk");

  const auto n = speed.size();
  double center = 0.0;
  for (double v : speed) center += v;
  center /= static_cast<double>(n);
  double k = 0.0;
  for (int yi : y) k += yi;
  Eigen::Vector2d b(logit(k / static_cast<double>(n)), 0.0);  // centred parameters

  auto log_lik = [&](const Eigen::Vector2d& c) {
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double eta = c(0) + c(1) * (speed[i] - center);
      ll += y[i] ? -std::log1p(std::exp(-eta)) : -std::log1p(std::exp(eta));
    }
    return ll;
  };

  LogisticCurve out;
  double ll = log_lik(b);
  Eigen::Matrix2d info = Eigen::Matrix2d::Zero();
  bool converged = false;
  for (int it = 1; it <= kMaxNewtonIterations; ++it) {
    Eigen::Vector2d score = Eigen::Vector2d::Zero();
    info.setZero();
    for (std::size_t i = 0; i < n; ++i) {
      const double x = speed[i] - center;
      const double p = logistic(b(0) + b(1) * x);
      const double wgt = p * (1.0 - p);
      score(0) += y[i] - p;
      score(1) += (y[i] - p) * x;
      info(0, 0) += wgt;
      info(0, 1) += wgt * x;
      info(1, 1) += wgt * x * x;
    }
    info(1, 0) = info(0, 1);
    const Eigen::Vector2d step = info.ldlt().solve(score);
    double t = 1.0;
    Eigen::Vector2d cand = b + step;
    double cand_ll = log_lik(cand);
    for (int h = 0; h < 60 && cand_ll < ll - 1e-13 * (1.0 + std::abs(ll)); ++h) {
      t *= 0.5;
      cand = b + t * step;
      cand_ll = log_lik(cand);
    }
    b = cand;
    ll = cand_ll;
    out.iterations = it;
    if ((t * step).lpNorm<Eigen::Infinity>() < 1e-10) {
      converged = true;
      break;
    }
  }
  out.slope = b(1);
  out.intercept = b(0) - b(1) * center;
  if (!converged) {
    throw NonConvergenceError("logistic injury risk did not converge",
                              {out.intercept, out.slope});
  }
  // Covariance in the centred parameters, mapped to (intercept, slope).
  const Eigen::Matrix2d cov_c = info.inverse();
  Eigen::Matrix2d jac;
  jac << 1.0, -center, 0.0, 1.0;
  const Eigen::Matrix2d cov = jac * cov_c * jac.transpose();
  out.se_intercept = std::sqrt(cov(0, 0));
  out.se_slope = std::sqrt(cov(1, 1));
  out.log_lik = ll;
  return out;
}

LogisticCurve fit_logistic_irc(const std::vector<PersonRecord>& persons, RiskLevel level) {
  std::vector<double> speed;
  std::vector<int> y;
  for (const auto& p : persons) {
    speed.push_back(p.collision_speed_kmh);
    y.push_back(level == RiskLevel::kFatal ? p.injury == Injury::kFatal
                                           : p.injury != Injury::kSlight);
  }
  if (speed.empty()) throw SeparationError("no person records");
  return fit_logistic_curve(speed, y);
}

InjuryRiskModel fit_logistic_irc_model(const std::vector<PersonRecord>& persons) {
  if (persons.empty()) throw SeparationError("no person records");
  InjuryRiskModel m;
  m.family = IrcFamily::kLogistic;
  m.vru_type = persons.front().vru_type;
  m.serious_or_worse = fit_logistic_irc(persons, RiskLevel::kSeriousOrWorse);
  m.fatal = fit_logistic_irc(persons, RiskLevel::kFatal);
  m.log_lik = m.serious_or_worse.log_lik + m.fatal.log_lik;
  m.aic = -2.0 * m.log_lik + 2.0 * 4;
  m.n_obs = static_cast<int>(persons.size());
  m.negative_slope = m.serious_or_worse.slope < 0.0 || m.fatal.slope < 0.0;
  return m;
}

Table irc_models_table(const std::vector<InjuryRiskModel>& models) {
  Table t;
  t.header = {"vru_type", "family", "beta", "tau1", "tau2", "loglik", "aic"};
  for (const auto& m : models) {
    const std::string type(to_string(m.vru_type));
    if (m.family == IrcFamily::kOrderedProbit) {
      t.rows.push_back({type, std::string("OrderedProbit"), m.beta, m.tau1, m.tau2, m.log_lik,
                        m.aic});
      continue;
    }
    for (const auto& [name, curve] :
         {std::pair{"LogisticSeriousOrWorse", &m.serious_or_worse},
          std::pair{"LogisticFatal", &m.fatal}}) {
      t.rows.push_back({type, std::string(name), curve->slope, -curve->intercept,
                        std::string(), curve->log_lik, -2.0 * curve->log_lik + 4.0});
    }
  }
  return t;
}

}  // namespace vru
