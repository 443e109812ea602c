#include "rascal/diag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rascal {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void canonicalize_columns(Mat& a) {
  for (int j = 0; j < a.cols; ++j) {
    int arg = 0;
    double best = 0.0;
    for (int i = 0; i < a.rows; ++i) {
      double v = std::abs(a(i, j));
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    if (a(arg, j) < 0.0)
      for (int i = 0; i < a.rows; ++i) a(i, j) = -a(i, j);
  }
}

}  // namespace

Mat pearson_correlation(const Mat& data) {
  const int n = data.rows, l = data.cols;
  Mat r(l, l);
  for (int i = 0; i < l; ++i) r(i, i) = 1.0;
  for (int i = 0; i < l; ++i)
    for (int j = i + 1; j < l; ++j) {
      long cnt = 0;
      double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
      for (int row = 0; row < n; ++row) {
        double x = data(row, i), y = data(row, j);
        if (std::isnan(x) || std::isnan(y)) continue;
        ++cnt;
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
      }
      if (cnt < 2) throw DataError("too few paired observations between columns " +
                                   std::to_string(i) + " and " + std::to_string(j));
      double vx = cnt * sxx - sx * sx;
      double vy = cnt * syy - sy * sy;
      if (vx <= 0.0) throw DataError("column " + std::to_string(i) + " is constant");
      if (vy <= 0.0) throw DataError("column " + std::to_string(j) + " is constant");
      r(i, j) = r(j, i) = (cnt * sxy - sx * sy) / std::sqrt(vx * vy);
    }
  return r;
}

double bartlett_chi2(int n, int l, double determinant) {
  return -(n - 1 - (2.0 * l + 5.0) / 6.0) * std::log(determinant);
}

PcaResult pca(const Mat& data, int n_components) {
  const int n = data.rows, l = data.cols;
  if (l < 2) throw DataError("pca needs at least 2 columns");
  if (n <= l) throw DataError("pca needs more rows than columns");

  PcaResult out;
  out.correlation = pearson_correlation(data);
  out.bartlett_df = l * (l - 1) / 2;

  SymEigen e = jacobi_eigen(out.correlation);
  out.eigenvalues = e.values;
  out.variance_pct.resize(l);
  for (int j = 0; j < l; ++j) out.variance_pct[j] = e.values[j] / l * 100.0;

  bool singular = false;
  Mat inv = sym_inverse(e, 1e-12, &singular);
  out.singular = singular;

  int k = std::clamp(n_components, 1, l);
  out.loadings = Mat(l, k);
  for (int j = 0; j < k; ++j) {
    double s = std::sqrt(std::max(e.values[j], 0.0));
    for (int i = 0; i < l; ++i) out.loadings(i, j) = e.vectors(i, j) * s;
  }

  if (singular) {
    out.determinant = 0.0;
    out.kmo = kNaN;
    out.bartlett_chi2 = std::numeric_limits<double>::infinity();
    out.bartlett_p = 0.0;
    return out;  // rotation refused
  }

  double det = 1.0;
  for (double v : e.values) det *= v;
  out.determinant = det;

  double r2 = 0.0, a2 = 0.0;
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j) {
      if (i == j) continue;
      double rij = out.correlation(i, j);
      double aij = -inv(i, j) / std::sqrt(inv(i, i) * inv(j, j));
      r2 += rij * rij;
      a2 += aij * aij;
    }
  out.kmo = r2 / (r2 + a2);

  out.bartlett_chi2 = bartlett_chi2(n, l, det);
  out.bartlett_p = chi2_upper_tail(out.bartlett_chi2, out.bartlett_df);

  out.rotated_loadings = k >= 2 ? varimax(out.loadings) : out.loadings;
  return out;
}

Mat varimax(const Mat& loadings, double tol, int max_sweeps) {
  const int l = loadings.rows, k = loadings.cols;
  Mat a = loadings;
  if (k < 2) return a;

  // Kaiser normalization: unit communalities during rotation
  std::vector<double> h(l, 0.0);
  for (int i = 0; i < l; ++i) {
    double s = 0.0;
    for (int j = 0; j < k; ++j) s += a(i, j) * a(i, j);
    h[i] = std::sqrt(s);
    if (h[i] > 0.0)
      for (int j = 0; j < k; ++j) a(i, j) /= h[i];
  }

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_angle = 0.0;
    for (int p = 0; p < k - 1; ++p)
      for (int q = p + 1; q < k; ++q) {
        double A = 0, B = 0, C = 0, D = 0;
        for (int i = 0; i < l; ++i) {
          double x = a(i, p), y = a(i, q);
          double u = x * x - y * y, v = 2.0 * x * y;
          A += u;
          B += v;
          C += u * u - v * v;
          D += 2.0 * u * v;
        }
        double num = D - 2.0 * A * B / l;
        double den = C - (A * A - B * B) / l;
        double phi = 0.25 * std::atan2(num, den);
        if (std::abs(phi) < 1e-15) continue;
        max_angle = std::max(max_angle, std::abs(phi));
        double c = std::cos(phi), s = std::sin(phi);
        for (int i = 0; i < l; ++i) {
          double x = a(i, p), y = a(i, q);
          a(i, p) = c * x + s * y;
          a(i, q) = -s * x + c * y;
        }
      }
    if (max_angle < tol) break;
  }

  for (int i = 0; i < l; ++i)
    if (h[i] > 0.0)
      for (int j = 0; j < k; ++j) a(i, j) *= h[i];
  canonicalize_columns(a);
  return a;
}

ParallelResult parallel_analysis(int n, int l, int replications, uint64_t seed) {
  if (replications < 1) throw std::invalid_argument("replications must be at least 1");
  if (n < 2 || l < 1) throw std::invalid_argument("parallel_analysis needs n >= 2, l >= 1");

  ParallelResult out;
  out.replications = replications;
  out.mean_eigenvalues.assign(l, 0.0);
  out.pct95_eigenvalues.assign(l, 0.0);

  // roots_by_rank[root][replication]
  std::vector<std::vector<double>> roots(l, std::vector<double>(replications));
  for (int rep = 0; rep < replications; ++rep) {
    SplitMix64 rng(derive_seed(seed, static_cast<uint64_t>(rep)));
    Mat x(n, l);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < l; ++c) x(r, c) = rng.normal();
    SymEigen e = (l == 1) ? SymEigen{{1.0}, Mat(1, 1, 1.0)}
                          : jacobi_eigen(pearson_correlation(x));
    for (int j = 0; j < l; ++j) roots[j][rep] = e.values[j];
  }

  // nearest-rank percentile: ascending order statistic ceil(0.95 R)
  int rank = static_cast<int>(std::ceil(0.95 * replications));
  rank = std::clamp(rank, 1, replications);
  for (int j = 0; j < l; ++j) {
    out.mean_eigenvalues[j] = mean(roots[j]);
    std::vector<double> sorted = roots[j];
    std::sort(sorted.begin(), sorted.end());
    out.pct95_eigenvalues[j] = sorted[rank - 1];
  }
  return out;
}

int retained_components(const std::vector<double>& observed, const ParallelResult& pa) {
  int k = static_cast<int>(std::min(observed.size(), pa.pct95_eigenvalues.size()));
  int kept = 0;
  for (int j = 0; j < k; ++j)
    if (observed[j] > pa.pct95_eigenvalues[j]) ++kept;
  return kept;
}

CttResult ctt_summary(const ResponseMatrix& m) {
  if (!m.scored) throw DataError("ctt_summary requires a scored matrix");
  const int l = m.n_items();
  if (l < 2) throw DataError("ctt_summary needs at least 2 items");

  // listwise: complete rows only, on external scores
  std::vector<std::vector<double>> col(l);
  std::vector<double> total;
  for (int v = 0; v < m.n_persons(); ++v) {
    bool complete = true;
    for (int i = 0; i < l; ++i)
      if (m.is_missing(v, i)) {
        complete = false;
        break;
      }
    if (!complete) continue;
    double t = 0.0;
    for (int i = 0; i < l; ++i) {
      double x = static_cast<double>(m.external_score(v, i));
      col[i].push_back(x);
      t += x;
    }
    total.push_back(t);
  }
  const int n = static_cast<int>(total.size());
  if (n < 2) throw DataError("ctt_summary needs at least 2 complete cases");

  double var_total = variance_sample(total);
  if (var_total <= 0.0) throw DataError("total score variance is zero; alpha undefined");

  std::vector<double> item_var(l);
  double sum_item_var = 0.0;
  for (int i = 0; i < l; ++i) {
    item_var[i] = variance_sample(col[i]);
    sum_item_var += item_var[i];
  }

  CttResult out;
  out.n_complete = n;
  out.alpha = (static_cast<double>(l) / (l - 1)) * (1.0 - sum_item_var / var_total);

  double rbar = 0.0;
  int pairs = 0;
  for (int i = 0; i < l; ++i)
    for (int j = i + 1; j < l; ++j) {
      rbar += pearson(col[i], col[j]);
      ++pairs;
    }
  rbar /= pairs;
  out.alpha_standardized = l * rbar / (1.0 + (l - 1) * rbar);

  out.items.resize(l);
  for (int i = 0; i < l; ++i) {
    auto& it = out.items[i];
    it.id = m.item_ids[i];
    std::vector<double> rest(n);
    for (int v = 0; v < n; ++v) rest[v] = total[v] - col[i][v];
    it.scale_mean_if_deleted = mean(rest);
    it.scale_var_if_deleted = variance_sample(rest);
    it.corrected_item_total = pearson(col[i], rest);
    if (l > 2 && it.scale_var_if_deleted > 0.0) {
      double rest_item_var = sum_item_var - item_var[i];
      it.alpha_if_deleted =
          (static_cast<double>(l - 1) / (l - 2)) * (1.0 - rest_item_var / it.scale_var_if_deleted);
    } else {
      it.alpha_if_deleted = kNaN;
    }
  }
  return out;
}

}  // namespace rascal
