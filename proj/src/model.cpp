#include "rascal/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rascal/mathutil.hpp"

namespace rascal {

namespace detail {

std::vector<double> cumulative_tau(const std::vector<double>& tau) {
  std::vector<double> cum(tau.size() + 1, 0.0);
  for (size_t j = 0; j < tau.size(); ++j) cum[j + 1] = cum[j] + tau[j];
  return cum;
}

void rsm_probs_into(double bd, const std::vector<double>& cumtau, double* out) {
  const int m = static_cast<int>(cumtau.size()) - 1;
  double maxpsi = 0.0;
  for (int x = 0; x <= m; ++x) {
    out[x] = x * bd - cumtau[x];
    maxpsi = std::max(maxpsi, out[x]);
  }
  double norm = 0.0;
  for (int x = 0; x <= m; ++x) {
    out[x] = std::exp(out[x] - maxpsi);
    norm += out[x];
  }
  for (int x = 0; x <= m; ++x) out[x] /= norm;
}

CellMoments rsm_moments(double bd, const std::vector<double>& cumtau) {
  const int m = static_cast<int>(cumtau.size()) - 1;
  double p[64];
  rsm_probs_into(bd, cumtau, p);
  double e = 0.0;
  for (int x = 1; x <= m; ++x) e += x * p[x];
  double v = 0.0, c4 = 0.0;
  for (int x = 0; x <= m; ++x) {
    double d = x - e, d2 = d * d;
    v += d2 * p[x];
    c4 += d2 * d2 * p[x];
  }
  return {e, v, c4};
}

double rsm_cum_prob(double bd, const std::vector<double>& cumtau, int k) {
  const int m = static_cast<int>(cumtau.size()) - 1;
  double p[64];
  rsm_probs_into(bd, cumtau, p);
  double s = 0.0;
  for (int x = k; x <= m; ++x) s += p[x];
  return s;
}

}  // namespace detail

static void check_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw std::domain_error(std::string("non-finite ") + what);
}

static void check_tau(const std::vector<double>& tau) {
  if (tau.empty()) throw std::domain_error("threshold vector is empty");
  if (tau.size() > 63) throw std::domain_error("threshold vector too long");
  for (double t : tau) check_finite(t, "threshold");
}

double dichotomous_prob(double beta, double delta) {
  check_finite(beta, "person measure");
  check_finite(delta, "item measure");
  return logistic(beta - delta);
}

double three_pl_prob(double beta, double sigma, double a, double c) {
  check_finite(beta, "person measure");
  check_finite(sigma, "item measure");
  check_finite(a, "discrimination");
  if (!(c >= 0.0 && c < 1.0)) throw std::domain_error("guessing parameter outside [0,1)");
  return c + (1.0 - c) * logistic(a * (beta - sigma));
}

std::vector<double> rsm_category_probs(double beta, double delta, const std::vector<double>& tau) {
  check_finite(beta, "person measure");
  check_finite(delta, "item measure");
  check_tau(tau);
  auto cum = detail::cumulative_tau(tau);
  std::vector<double> out(tau.size() + 1);
  detail::rsm_probs_into(beta - delta, cum, out.data());
  return out;
}

std::pair<double, double> expected_score_and_variance(double beta, double delta,
                                                      const std::vector<double>& tau) {
  check_finite(beta, "person measure");
  check_finite(delta, "item measure");
  check_tau(tau);
  auto cum = detail::cumulative_tau(tau);
  auto mo = detail::rsm_moments(beta - delta, cum);
  return {mo.e, mo.v};
}

// Search bracket: the cumulative probability and expected score both run
// between their asymptotes well inside +-50 logits of delta.
static constexpr double kBracket = 50.0;

std::vector<double> thurstone_thresholds(double delta, const std::vector<double>& tau) {
  check_finite(delta, "item measure");
  check_tau(tau);
  auto cum = detail::cumulative_tau(tau);
  const int m = static_cast<int>(tau.size());
  std::vector<double> out(m);
  for (int k = 1; k <= m; ++k) {
    out[k - 1] = solve_increasing(
        [&](double beta) { return detail::rsm_cum_prob(beta - delta, cum, k); }, 0.5,
        delta - kBracket, delta + kBracket, 1e-10);
  }
  return out;
}

double score_to_measure(double target, double delta, const std::vector<double>& tau) {
  check_tau(tau);
  const int m = static_cast<int>(tau.size());
  if (!(target > 0.0 && target < m))
    throw std::domain_error("score-to-measure target outside (0, m)");
  auto cum = detail::cumulative_tau(tau);
  return solve_increasing(
      [&](double beta) { return detail::rsm_moments(beta - delta, cum).e; }, target,
      delta - kBracket, delta + kBracket, 1e-10);
}

std::vector<double> category_measures(double delta, const std::vector<double>& tau) {
  check_tau(tau);
  const int m = static_cast<int>(tau.size());
  std::vector<double> out(m + 1);
  out[0] = score_to_measure(0.25, delta, tau);
  for (int x = 1; x < m; ++x) out[x] = score_to_measure(static_cast<double>(x), delta, tau);
  out[m] = score_to_measure(m - 0.25, delta, tau);
  return out;
}

}  // namespace rascal
