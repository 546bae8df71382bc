#pragma once

#include <array>
#include <map>
#include <optional>
#include <vector>

#include "vru/csv.hpp"
#include "vru/domain.hpp"
#include "vru/simulator.hpp"

namespace vru {

struct BetaParams {
  double a = 0.5;
  double b = 0.5;

  bool operator==(const BetaParams&) const = default;
};

inline constexpr double kCountFloor = 0.5;

// Beta(avoided, not_avoided) with zero counts floored to 0.5. Both zero is an
// EmptyGroupError.
BetaParams prior_from_counts(double avoided, double not_avoided);

struct SimCounts {
  int avoided = 0;
  int not_avoided = 0;
};

// Simulated outcomes grouped by car_speed_init (km/h). `outcomes` must be in
// the same order as `crashes`.
std::map<double, SimCounts> sim_counts_by_speed(const std::vector<CrashRecord>& crashes,
                                                const std::vector<SimOutcome>& outcomes);
std::map<double, BetaParams> prior_from_sims(const std::vector<CrashRecord>& crashes,
                                             const std::vector<SimOutcome>& outcomes);

// c = a + w*sum_y, d = b + w*(n - sum_y).
BetaParams bayes_update(BetaParams prior, int n_tests, int sum_y, double w);
BetaParams bayes_update(BetaParams prior, const std::vector<TestObservation>& tests,
                        double w);

double beta_cdf(const BetaParams& p, double x);
double beta_quantile(const BetaParams& p, double q);
double beta_mean(const BetaParams& p) noexcept;

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

struct FrequentistEstimate {
  double p_hat = 0.0;
  Interval wilson90;
};

// Pooled proportion (a + w*sum_y) / (a + b + w*n) and its 90% Wilson score
// interval; `prior` is already floored.
FrequentistEstimate frequentist_estimate(BetaParams prior, int n_tests, int sum_y, double w);
Interval wilson_interval(double successes, double total, double z);

enum class StatisticalMode { kBayesian, kFrequentist };
VRU_ENUM_NAMES(StatisticalMode, "Bayesian"sv, "Frequentist"sv);

struct QuantileLevels {
  double low = 0.05;
  double high = 0.95;
};

struct SpeedBin {
  double car_speed_init = 0.0;
  SimCounts sims;
  BetaParams prior;
  BetaParams posterior;
  int n_tests = 0;
  int sum_y = 0;
  double p_median = 0.0;
  double p_lower = 0.0;
  double p_upper = 0.0;
};

inline constexpr double kSpeedMatchWindow = 2.5;

// One bin per simulated speed. Each bin takes the tests run at the nearest
// tested speed within +-2.5 km/h (ties go to the lower test speed); bins
// without a match stay prior-only. Tests far from every simulated speed are
// not used.
std::vector<SpeedBin> build_speed_bins(const std::map<double, SimCounts>& sims,
                                       const std::vector<TestObservation>& tests, double w,
                                       StatisticalMode mode = StatisticalMode::kBayesian,
                                       QuantileLevels q = {});

enum class CurveForm { kLogistic, kPoly2 };
VRU_ENUM_NAMES(CurveForm, "Logistic"sv, "Poly2"sv);

enum class Bound { kLower, kMedian, kUpper };
VRU_ENUM_NAMES(Bound, "lower"sv, "median"sv, "upper"sv);

struct CurvePoint {
  double speed = 0.0;
  double median = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// Logistic: {beta0, beta1, 0}. Poly2: {c0, c1, c2} for c0 + c1 v + c2 v^2.
using CurveCoeffs = std::array<double, 3>;

struct AvoidanceCurve {
  CurveForm form = CurveForm::kLogistic;
  CurveCoeffs median{};
  CurveCoeffs lower{};
  CurveCoeffs upper{};
  double fit_residual = 0.0;  // summed over the three fits
  double speed_min = 0.0;
  double speed_max = 0.0;
};

struct CurveFit {
  CurveCoeffs coeffs{};
  double residual = 0.0;
  int iterations = 0;
};

// Least squares of sigmoid(b0 + b1 v) against `ys`, damped Gauss-Newton.
CurveFit fit_logistic(const std::vector<double>& speeds, const std::vector<double>& ys);
CurveFit fit_poly2(const std::vector<double>& speeds, const std::vector<double>& ys);

AvoidanceCurve fit_avoidance_curve(const std::vector<CurvePoint>& points, CurveForm form);
// Logistic unless it fails to converge or its residual exceeds 3x the Poly2
// residual.
AvoidanceCurve fit_avoidance_curve_auto(const std::vector<CurvePoint>& points);

double evaluate_coeffs(CurveForm form, const CurveCoeffs& c, double v) noexcept;
// Curve value in [0, 1]; lower/upper are ordered around the median.
double evaluate(const AvoidanceCurve& curve, double v, Bound bound = Bound::kMedian) noexcept;

std::vector<CurvePoint> curve_points(const std::vector<SpeedBin>& bins);

struct AvoidanceModel {
  UseCase use_case = UseCase::kUC1;
  Algorithm algorithm = Algorithm::kA1;
  std::vector<SpeedBin> bins;
  AvoidanceCurve curve;
};

struct AvoidanceOptions {
  double w = 2.0;
  StatisticalMode mode = StatisticalMode::kBayesian;
  QuantileLevels quantiles;
  std::optional<CurveForm> form;  // nullopt: automatic Poly2 fallback
};

// Tests are filtered to the use case and the algorithm's test family.
AvoidanceModel build_avoidance_model(UseCase uc, Algorithm algorithm,
                                     const std::vector<CrashRecord>& crashes,
                                     const std::vector<SimOutcome>& outcomes,
                                     const std::vector<TestObservation>& tests,
                                     const AvoidanceOptions& options);

Table avoidance_models_table(const std::vector<AvoidanceModel>& models);
Table speed_bins_table(const std::vector<AvoidanceModel>& models);

}  // namespace vru
