#include "rascal/mathutil.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rascal {

double logistic(double x) {
  if (x >= 0.0) {
    double z = std::exp(-x);
    return 1.0 / (1.0 + z);
  }
  double z = std::exp(x);
  return z / (1.0 + z);
}

double log1pexp(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

SymEigen jacobi_eigen(Mat a, double tol, int max_sweeps) {
  if (a.rows != a.cols || a.rows == 0) throw std::invalid_argument("jacobi_eigen: square matrix required");
  const int n = a.rows;

  Mat v(n, n, 0.0);
  for (int i = 0; i < n; ++i) v(i, i) = 1.0;

  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale += a(i, j) * a(i, j);
  scale = std::sqrt(scale);
  const double thresh = tol * (scale > 0.0 ? scale : 1.0);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    off = std::sqrt(2.0 * off);
    if (off <= thresh) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = a(p, q);
        if (std::abs(apq) <= thresh / (n * n)) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;

        for (int k = 0; k < n; ++k) {
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) > a(j, j); });

  SymEigen out;
  out.values.resize(n);
  out.vectors = Mat(n, n);
  for (int j = 0; j < n; ++j) {
    int src = order[j];
    out.values[j] = a(src, src);
    int arg = 0;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      out.vectors(i, j) = v(i, src);
      if (std::abs(v(i, src)) > best) {
        best = std::abs(v(i, src));
        arg = i;
      }
    }
    if (out.vectors(arg, j) < 0.0)
      for (int i = 0; i < n; ++i) out.vectors(i, j) = -out.vectors(i, j);
  }
  return out;
}

Mat sym_inverse(const SymEigen& e, double rcond, bool* singular) {
  const int n = static_cast<int>(e.values.size());
  double vmax = 0.0;
  for (double l : e.values) vmax = std::max(vmax, std::abs(l));
  double cutoff = vmax * rcond;
  for (double l : e.values) {
    if (std::abs(l) <= cutoff) {
      if (singular) *singular = true;
      return Mat();
    }
  }
  if (singular) *singular = false;
  Mat inv(n, n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += e.vectors(i, k) * e.vectors(j, k) / e.values[k];
      inv(i, j) = s;
      inv(j, i) = s;
    }
  return inv;
}

// Regularized incomplete gamma (series for x < a+1, continued fraction above).
static double reg_gamma_p_series(double a, double x) {
  double sum = 1.0 / a, term = sum;
  for (int n = 1; n < 2000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(a * std::log(x) - x - std::lgamma(a));
}

static double reg_gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 2000; ++i) {
    double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return h * std::exp(a * std::log(x) - x - std::lgamma(a));
}

double chi2_upper_tail(double x, double df) {
  if (df <= 0.0) throw std::domain_error("chi2_upper_tail: df must be positive");
  if (!(x == x)) throw std::domain_error("chi2_upper_tail: NaN statistic");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  double a = 0.5 * df, xx = 0.5 * x;
  if (xx < a + 1.0) return 1.0 - reg_gamma_p_series(a, xx);
  return reg_gamma_q_cf(a, xx);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double variance_pop(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double m = mean(v), s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

double variance_sample(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean(v), s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("pearson: length mismatch");
  double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) throw std::invalid_argument("pearson: zero-variance input");
  return sxy / std::sqrt(sxx * syy);
}

double solve_increasing(const std::function<double(double)>& f, double target, double lo,
                        double hi, double ftol, int max_iter) {
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < max_iter; ++it) {
    mid = 0.5 * (lo + hi);
    double val = f(mid);
    if (std::abs(val - target) < ftol) return mid;
    if (val < target)
      lo = mid;
    else
      hi = mid;
  }
  return mid;
}

double SplitMix64::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform(), u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double t = 2.0 * kPi * u2;
  spare_ = r * std::sin(t);
  have_spare_ = true;
  return r * std::cos(t);
}

uint64_t derive_seed(uint64_t seed, uint64_t stream) {
  SplitMix64 g(seed ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL));
  return g.next();
}

}  // namespace rascal
