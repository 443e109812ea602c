// PROX initialization and joint (unconditional) maximum-likelihood
// calibration via Newton-Raphson, including rating-scale threshold
// estimation and standard errors.
#pragma once

#include <string>
#include <vector>

#include "rascal/matrix.hpp"
#include "rascal/model.hpp"

namespace rascal {

struct ProxInputs {
  double H = 0.0;       // mean item difficulty
  double M = 0.0;       // mean person ability
  double omega2 = 0.0;  // item difficulty variance
  double sigma2 = 0.0;  // person ability variance
  double X = 1.0;       // person expansion sqrt(1 + omega2/1.7^2)
  double Y = 1.0;       // item expansion sqrt(1 + sigma2/1.7^2)
};

struct ProxResult {
  std::vector<double> person_measures;
  std::vector<double> item_measures;  // centered to mean 0
  std::vector<double> person_se;      // ~ 2.5/sqrt(L_v)
  std::vector<double> item_se;        // ~ 2.5/sqrt(N_i)
  ProxInputs inputs;                  // the expanded (second) pass
};

// b = H + X ln(r/(max-r)); polytomous data uses the maximum attainable score.
double prox_person_estimate(double H, double X, double raw, double max_raw);
// d = M + Y ln((max-s)/s)
double prox_item_estimate(double M, double Y, double raw, double max_raw);

// Two passes: the first with H=M=0, X=Y=1, the second expanded with the
// computed means and variances. Requires a trimmed (extreme-free) matrix.
ProxResult prox_initialize(const ResponseMatrix& trimmed);

struct PersonRecord {
  std::string id;
  double raw = 0.0;
  int count = 0;
  double measure = 0.0;
  double se = 0.0;
  bool extreme = false;
};

struct ItemRecord {
  std::string id;
  double raw = 0.0;
  int count = 0;
  double measure = 0.0;
  double se = 0.0;
};

struct IterationStep {
  double max_dbeta = 0.0;
  double max_ddelta = 0.0;
  double max_dtau = 0.0;
  double loglik = 0.0;
};

struct ConvergenceTrace {
  std::vector<IterationStep> steps;
  bool converged = false;
  int iterations = 0;
};

struct EstimateConfig {
  double tolerance = 1e-3;  // max absolute parameter change per iteration
  int max_iter = 100;
  double damping = 1.0;  // Newton step clamp, logits
  bool bias_correction = false;  // (L-1)/L rescale of item measures
};

struct Calibration {
  std::vector<PersonRecord> persons;
  std::vector<ItemRecord> items;
  CategoryStructure structure;
  ConvergenceTrace trace;
  int max_score = 1;  // m

  std::vector<double> person_measures() const;
  std::vector<double> item_measures() const;
};

// Alternating Newton-Raphson sweeps over persons, items, and thresholds,
// Jacobi-style within each sweep; item measures re-centered to mean 0 each
// iteration. Non-convergence is flagged on the trace, not thrown.
Calibration jmle_calibrate(const ResponseMatrix& trimmed, const EstimateConfig& cfg = {});

// Joint log-likelihood of the scored matrix at the given parameters; the
// dichotomous case is sum r*beta - sum s*delta - sumsum ln(1+e^(beta-delta)).
double loglikelihood(const ResponseMatrix& scored, const std::vector<double>& beta,
                     const std::vector<double>& delta, const std::vector<double>& tau);

}  // namespace rascal
