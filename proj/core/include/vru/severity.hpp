#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "vru/csv.hpp"
#include "vru/domain.hpp"
#include "vru/simulator.hpp"

namespace vru {

// ---- Collision speed model -------------------------------------------------

enum class Covariate {
  kCarSpeedInit,
  kVruSpeedInit,
  kLongDist,
  kLatDist,
  kSightObstruction,
  kLocation
};
VRU_ENUM_NAMES(Covariate, "car_speed_init"sv, "vru_speed_init"sv, "long_dist"sv,
               "lat_dist"sv, "sight_obstruction"sv, "location"sv);

// One design-matrix column: a numeric covariate (level < 0) or the dummy of a
// categorical level against the reference level (No / Urban).
struct DesignColumn {
  Covariate covariate = Covariate::kCarSpeedInit;
  int level = -1;

  bool operator==(const DesignColumn&) const = default;
};

std::string column_name(const DesignColumn& column);
double column_value(const DesignColumn& column, const CrashRecord& crash) noexcept;
// Design columns for a covariate subset; dummies with zero variance in `data`
// are dropped.
std::vector<DesignColumn> design_columns(const std::vector<Covariate>& subset,
                                         const std::vector<CrashRecord>& data);

enum class SpeedModelKind { kRegression, kInterceptOnly, kOriginalSpeed };
VRU_ENUM_NAMES(SpeedModelKind, "Regression"sv, "InterceptOnly"sv, "OriginalSpeed"sv);

struct SpeedModel {
  UseCase use_case = UseCase::kUC1;
  Algorithm algorithm = Algorithm::kA1;
  SpeedModelKind kind = SpeedModelKind::kRegression;
  std::vector<Covariate> covariates;
  std::vector<DesignColumn> columns;  // excluding the intercept
  std::vector<double> coefficients;   // intercept first
  double residual_std = 0.0;
  int n_obs = 0;
  double aic = 0.0;
};

inline constexpr int kMinCollisions = 8;
inline constexpr double kMaxVif = 10.0;
inline constexpr double kMaxCondition = 30.0;
inline constexpr double kRssFloor = 1e-9;

struct Collinearity {
  double max_vif = 1.0;
  double condition = 1.0;
  bool ok = true;
};

// Guard over non-intercept columns (n x k): VIF from the inverse correlation
// matrix, condition number sqrt(lmax / lmin) of the correlation matrix.
Collinearity check_collinearity(const Eigen::MatrixXd& columns);

double speed_model_aic(int n, double rss, int n_coefficients) noexcept;

// Fits on the crashes whose outcome is a collision; `outcomes` aligned with
// `crashes`. Throws TooFewCollisionsError below 8 collisions.
SpeedModel fit_speed_model(const std::vector<CrashRecord>& crashes,
                           const std::vector<SimOutcome>& outcomes);
// As above, falling back to the intercept-only model below 8 collisions and
// to the original collision speed when there are none.
SpeedModel fit_speed_model_or_fallback(const std::vector<CrashRecord>& crashes,
                                       const std::vector<SimOutcome>& outcomes);

struct SpeedPrediction {
  double point = 0.0;  // integer km/h
  double low = 0.0;
  double high = 0.0;
};

double raw_speed_prediction(const SpeedModel& model, const CrashRecord& crash) noexcept;
SpeedPrediction predict_collision_speed(const SpeedModel& model, const CrashRecord& crash);

Table speed_models_table(const std::vector<SpeedModel>& models);

// ---- Injury risk -----------------------------------------------------------

enum class IrcFamily { kOrderedProbit, kLogistic };
VRU_ENUM_NAMES(IrcFamily, "OrderedProbit"sv, "Logistic"sv);

enum class RiskLevel { kSeriousOrWorse, kFatal };
VRU_ENUM_NAMES(RiskLevel, "SeriousOrWorse"sv, "Fatal"sv);

struct LogisticCurve {
  double intercept = 0.0;
  double slope = 0.0;
  double se_intercept = 0.0;
  double se_slope = 0.0;
  double log_lik = 0.0;
  int iterations = 0;
};

struct InjuryRiskModel {
  IrcFamily family = IrcFamily::kOrderedProbit;
  VruType vru_type = VruType::kCyclist;
  // Ordered probit
  double beta = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  double se_beta = 0.0;
  double se_tau1 = 0.0;
  double se_tau2 = 0.0;
  // Logistic family
  LogisticCurve serious_or_worse;
  LogisticCurve fatal;

  double log_lik = 0.0;
  double aic = 0.0;
  int n_obs = 0;
  int iterations = 0;
  bool negative_slope = false;
};

// Ordered probit models with the published cyclist / pedestrian estimates.
InjuryRiskModel builtin_probit(VruType type);

// Probabilities of Slight, Serious, Fatal at collision speed v.
std::array<double, 3> class_probabilities(double beta, double tau1, double tau2, double v);

double injury_risk(const InjuryRiskModel& model, RiskLevel level, double v);

struct ProbitData {
  std::vector<double> speed;
  std::vector<int> cls;  // 0 Slight, 1 Serious, 2 Fatal
};

ProbitData probit_data(const std::vector<PersonRecord>& persons);

// Log-likelihood in the unconstrained parameters (beta, tau1, delta) with
// tau2 = tau1 + exp(delta); gradient and Hessian are analytic.
struct ProbitEval {
  double log_lik = 0.0;
  Eigen::Vector3d gradient = Eigen::Vector3d::Zero();
  Eigen::Matrix3d hessian = Eigen::Matrix3d::Zero();
};
ProbitEval probit_log_likelihood(const ProbitData& data, const Eigen::Vector3d& theta);

InjuryRiskModel fit_ordered_probit(const std::vector<PersonRecord>& persons);
InjuryRiskModel fit_ordered_probit(const ProbitData& data, VruType type);

LogisticCurve fit_logistic_curve(const std::vector<double>& speed, const std::vector<int>& y);
LogisticCurve fit_logistic_irc(const std::vector<PersonRecord>& persons, RiskLevel level);
// Both levels; throws when either fit fails.
InjuryRiskModel fit_logistic_irc_model(const std::vector<PersonRecord>& persons);

Table irc_models_table(const std::vector<InjuryRiskModel>& models);

}  // namespace vru
