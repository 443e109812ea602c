#include "rascal/estimate.hpp"

#include <algorithm>
#include <cmath>

#include "rascal/mathutil.hpp"

namespace rascal {

std::vector<double> Calibration::person_measures() const {
  std::vector<double> v;
  v.reserve(persons.size());
  for (const auto& p : persons) v.push_back(p.measure);
  return v;
}

std::vector<double> Calibration::item_measures() const {
  std::vector<double> v;
  v.reserve(items.size());
  for (const auto& i : items) v.push_back(i.measure);
  return v;
}

double prox_person_estimate(double H, double X, double raw, double max_raw) {
  if (!(raw > 0.0 && raw < max_raw))
    throw std::invalid_argument("prox_person_estimate: raw score is extreme");
  return H + X * std::log(raw / (max_raw - raw));
}

double prox_item_estimate(double M, double Y, double raw, double max_raw) {
  if (!(raw > 0.0 && raw < max_raw))
    throw std::invalid_argument("prox_item_estimate: raw score is extreme");
  return M + Y * std::log((max_raw - raw) / raw);
}

ProxResult prox_initialize(const ResponseMatrix& m) {
  if (!m.scored) throw DataError("prox_initialize requires a scored matrix");
  const int n = m.n_persons(), l = m.n_items();

  std::vector<double> b(n), d(l);
  for (int v = 0; v < n; ++v) {
    double raw = static_cast<double>(m.person_raw_score(v));
    double cap = static_cast<double>(m.person_max_score(v));
    if (!(raw > 0.0 && raw < cap))
      throw DataError("prox: person " + m.person_ids[v] + " has an extreme score (trim first)");
    b[v] = prox_person_estimate(0.0, 1.0, raw, cap);
  }
  for (int i = 0; i < l; ++i) {
    double raw = static_cast<double>(m.item_raw_score(i));
    double cap = static_cast<double>(m.item_max_score(i));
    if (!(raw > 0.0 && raw < cap))
      throw DataError("prox: item " + m.item_ids[i] + " has an extreme score (trim first)");
    d[i] = prox_item_estimate(0.0, 1.0, raw, cap);
  }

  ProxInputs inputs;
  inputs.H = mean(d);
  inputs.M = mean(b);
  inputs.omega2 = variance_pop(d);
  inputs.sigma2 = variance_pop(b);
  inputs.X = std::sqrt(1.0 + inputs.omega2 / 2.89);
  inputs.Y = std::sqrt(1.0 + inputs.sigma2 / 2.89);

  ProxResult out;
  out.inputs = inputs;
  out.person_measures.resize(n);
  out.item_measures.resize(l);
  out.person_se.resize(n);
  out.item_se.resize(l);
  for (int v = 0; v < n; ++v) {
    double raw = static_cast<double>(m.person_raw_score(v));
    double cap = static_cast<double>(m.person_max_score(v));
    out.person_measures[v] = prox_person_estimate(inputs.H, inputs.X, raw, cap);
    out.person_se[v] = 2.5 / std::sqrt(static_cast<double>(m.person_count(v)));
  }
  for (int i = 0; i < l; ++i) {
    double raw = static_cast<double>(m.item_raw_score(i));
    double cap = static_cast<double>(m.item_max_score(i));
    out.item_measures[i] = prox_item_estimate(inputs.M, inputs.Y, raw, cap);
    out.item_se[i] = 2.5 / std::sqrt(static_cast<double>(m.item_count(i)));
  }

  // identification: items centered at 0, persons shifted to compensate
  double dbar = mean(out.item_measures);
  for (double& x : out.item_measures) x -= dbar;
  for (double& x : out.person_measures) x -= dbar;
  return out;
}

double loglikelihood(const ResponseMatrix& m, const std::vector<double>& beta,
                     const std::vector<double>& delta, const std::vector<double>& tau) {
  if (!m.scored) throw DataError("loglikelihood requires a scored matrix");
  auto cum = detail::cumulative_tau(tau);
  const int mm = static_cast<int>(tau.size());
  double lambda = 0.0;
  for (int v = 0; v < m.n_persons(); ++v) {
    for (int i = 0; i < m.n_items(); ++i) {
      int x = m.at(v, i);
      if (x == kMissing) continue;
      double bd = beta[v] - delta[i];
      // psi_x - ln sum_k exp(psi_k), with the max shifted out
      double maxpsi = 0.0;
      for (int k = 0; k <= mm; ++k) maxpsi = std::max(maxpsi, k * bd - cum[k]);
      double norm = 0.0;
      for (int k = 0; k <= mm; ++k) norm += std::exp(k * bd - cum[k] - maxpsi);
      lambda += (x * bd - cum[x] - maxpsi) - std::log(norm);
    }
  }
  return lambda;
}

namespace {

double clamp_step(double step, double cap) { return std::clamp(step, -cap, cap); }

}  // namespace

Calibration jmle_calibrate(const ResponseMatrix& m, const EstimateConfig& cfg) {
  if (!m.scored) throw DataError("jmle_calibrate requires a scored matrix");
  if (cfg.tolerance <= 0.0) throw std::invalid_argument("tolerance must be positive");
  if (cfg.max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");

  const int n = m.n_persons(), l = m.n_items();
  const int mm = m.shared_max_score();

  ProxResult prox = prox_initialize(m);
  std::vector<double> beta = prox.person_measures;
  std::vector<double> delta = prox.item_measures;
  std::vector<double> tau(mm, 0.0);

  std::vector<double> r(n), pcount(n), s(l);
  for (int v = 0; v < n; ++v) r[v] = static_cast<double>(m.person_raw_score(v));
  for (int i = 0; i < l; ++i) s[i] = static_cast<double>(m.item_raw_score(i));

  // category-count sufficient statistics for the threshold sweep:
  // C[k] = observed responses in categories >= k
  std::vector<double> cge(mm + 1, 0.0);
  std::vector<long> cat_counts(mm + 1, 0);
  for (int v = 0; v < n; ++v)
    for (int i = 0; i < l; ++i) {
      int x = m.at(v, i);
      if (x == kMissing) continue;
      ++cat_counts[x];
      for (int k = 1; k <= x; ++k) cge[k] += 1.0;
    }

  ConvergenceTrace trace;
  auto cum = detail::cumulative_tau(tau);

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    IterationStep step;

    // person sweep (items and thresholds fixed at the previous sweep)
    for (int v = 0; v < n; ++v) {
      double sumE = 0.0, sumV = 0.0;
      for (int i = 0; i < l; ++i) {
        if (m.is_missing(v, i)) continue;
        auto mo = detail::rsm_moments(beta[v] - delta[i], cum);
        sumE += mo.e;
        sumV += mo.v;
      }
      double d = clamp_step((r[v] - sumE) / sumV, cfg.damping);
      beta[v] += d;
      step.max_dbeta = std::max(step.max_dbeta, std::abs(d));
    }

    // item sweep
    for (int i = 0; i < l; ++i) {
      double sumE = 0.0, sumV = 0.0;
      for (int v = 0; v < n; ++v) {
        if (m.is_missing(v, i)) continue;
        auto mo = detail::rsm_moments(beta[v] - delta[i], cum);
        sumE += mo.e;
        sumV += mo.v;
      }
      double d = clamp_step((s[i] - sumE) / sumV, cfg.damping);
      delta[i] -= d;
      step.max_ddelta = std::max(step.max_ddelta, std::abs(d));
    }
    double dbar = mean(delta);
    for (double& x : delta) x -= dbar;
    for (double& x : beta) x -= dbar;

    // threshold sweep; dichotomous data has no free thresholds
    if (mm >= 2) {
      std::vector<double> tnew = tau;
      for (int k = 1; k <= mm; ++k) {
        double sumP = 0.0, sumPQ = 0.0;
        for (int v = 0; v < n; ++v)
          for (int i = 0; i < l; ++i) {
            if (m.is_missing(v, i)) continue;
            double p = detail::rsm_cum_prob(beta[v] - delta[i], cum, k);
            sumP += p;
            sumPQ += p * (1.0 - p);
          }
        double d = clamp_step((cge[k] - sumP) / sumPQ, cfg.damping);
        tnew[k - 1] = tau[k - 1] - d;
        step.max_dtau = std::max(step.max_dtau, std::abs(d));
      }
      // recenter thresholds; the compensating shift lands on the persons
      double tbar = mean(tnew);
      for (double& t : tnew) t -= tbar;
      for (double& x : beta) x -= tbar;
      tau = tnew;
      cum = detail::cumulative_tau(tau);
    }

    step.loglik = loglikelihood(m, beta, delta, tau);
    trace.steps.push_back(step);
    trace.iterations = iter + 1;
    if (step.max_dbeta < cfg.tolerance && step.max_ddelta < cfg.tolerance &&
        step.max_dtau < cfg.tolerance) {
      trace.converged = true;
      break;
    }
  }

  if (cfg.bias_correction && l > 1) {
    double f = static_cast<double>(l - 1) / static_cast<double>(l);
    for (double& x : delta) x *= f;
  }

  Calibration cal;
  cal.max_score = mm;
  cal.trace = trace;
  cal.persons.resize(n);
  cal.items.resize(l);
  for (int v = 0; v < n; ++v) {
    double sumV = 0.0;
    for (int i = 0; i < l; ++i) {
      if (m.is_missing(v, i)) continue;
      sumV += detail::rsm_moments(beta[v] - delta[i], cum).v;
    }
    auto& p = cal.persons[v];
    p.id = m.person_ids[v];
    p.raw = r[v];
    p.count = m.person_count(v);
    p.measure = beta[v];
    p.se = 1.0 / std::sqrt(sumV);
  }
  for (int i = 0; i < l; ++i) {
    double sumV = 0.0;
    for (int v = 0; v < n; ++v) {
      if (m.is_missing(v, i)) continue;
      sumV += detail::rsm_moments(beta[v] - delta[i], cum).v;
    }
    auto& it = cal.items[i];
    it.id = m.item_ids[i];
    it.raw = s[i];
    it.count = m.item_count(i);
    it.measure = delta[i];
    it.se = 1.0 / std::sqrt(sumV);
  }

  cal.structure.tau = tau;
  cal.structure.observed_counts = cat_counts;
  cal.structure.tau_se.assign(mm, 0.0);
  if (mm >= 2) {
    for (int k = 1; k <= mm; ++k) {
      double sumPQ = 0.0;
      for (int v = 0; v < n; ++v)
        for (int i = 0; i < l; ++i) {
          if (m.is_missing(v, i)) continue;
          double p = detail::rsm_cum_prob(beta[v] - delta[i], cum, k);
          sumPQ += p * (1.0 - p);
        }
      cal.structure.tau_se[k - 1] = 1.0 / std::sqrt(sumPQ);
    }
    cal.structure.thurstone = thurstone_thresholds(0.0, tau);
    cal.structure.category_measures = category_measures(0.0, tau);
  } else {
    cal.structure.tau_se[0] = 0.0;
    cal.structure.thurstone = {0.0};
    cal.structure.category_measures = category_measures(0.0, tau);
  }
  return cal;
}

}  // namespace rascal
