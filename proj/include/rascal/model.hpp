// Closed-form probability machinery: dichotomous Rasch, 3-PL evaluation,
// Rating Scale Model category probabilities, expected scores and variances,
// Andrich/Thurstone threshold conversions.
#pragma once

#include <utility>
#include <vector>

namespace rascal {

// P(X=1) = e^(beta-delta) / (1 + e^(beta-delta))
double dichotomous_prob(double beta, double delta);

// c + (1-c) * e^{a(beta-sigma)} / (1 + e^{a(beta-sigma)}); evaluation only,
// no estimation. Reduces to the dichotomous form at a=1, c=0.
double three_pl_prob(double beta, double sigma, double a, double c);

// RSM category probabilities pi_0..pi_m given m shared thresholds.
// pi_x is proportional to exp(sum_{j<=x} [beta - (delta + tau_j)]), the
// empty sum for x=0; computed with a max-exponent shift.
std::vector<double> rsm_category_probs(double beta, double delta, const std::vector<double>& tau);

// E = sum x*pi_x (strictly increasing in beta) and V = sum (x-E)^2 pi_x.
std::pair<double, double> expected_score_and_variance(double beta, double delta,
                                                      const std::vector<double>& tau);

// k-th value is the beta where P(X >= k) = 0.5, by bisection on the
// monotone cumulative probability. Strictly increasing output.
std::vector<double> thurstone_thresholds(double delta, const std::vector<double>& tau);

// m+1 locations: beta where E equals the interior category score; the
// extremes use the finite E = 0.25 and E = m - 0.25 proxies.
std::vector<double> category_measures(double delta, const std::vector<double>& tau);

// beta solving E(beta) = target (0 < target < m), by bisection.
double score_to_measure(double target, double delta, const std::vector<double>& tau);

// Shared rating-scale summary attached to a calibration.
struct CategoryStructure {
  std::vector<double> tau;                // m Andrich thresholds, sum 0
  std::vector<double> tau_se;             // m standard errors
  std::vector<double> thurstone;          // m 50% cumulative thresholds (delta = 0)
  std::vector<double> category_measures;  // m+1 locations (delta = 0)
  std::vector<long> observed_counts;      // m+1 response counts
};

namespace detail {

// Hot-loop internals shared with estimation and fit: cumtau[x] = tau_1+..+tau_x
// (cumtau[0] = 0), probabilities written into out[0..m].
std::vector<double> cumulative_tau(const std::vector<double>& tau);
void rsm_probs_into(double beta_minus_delta, const std::vector<double>& cumtau, double* out);

struct CellMoments {
  double e;   // expected score
  double v;   // variance
  double c4;  // fourth central moment (fit-statistic kurtosis terms)
};
CellMoments rsm_moments(double beta_minus_delta, const std::vector<double>& cumtau);

// P(X >= k), k in 1..m.
double rsm_cum_prob(double beta_minus_delta, const std::vector<double>& cumtau, int k);

}  // namespace detail

}  // namespace rascal
