// Dimensionality and classical diagnostics: PCA of residuals or scores,
// determinant/KMO/Bartlett, varimax rotation, Horn parallel analysis,
// Cronbach's alpha with item-total statistics.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rascal/mathutil.hpp"
#include "rascal/matrix.hpp"

namespace rascal {

struct PcaResult {
  Mat correlation;                   // L x L Pearson
  double determinant = 1.0;          // product of eigenvalues; 0 when singular
  double kmo = 0.0;                  // NaN when the inverse is unavailable
  double bartlett_chi2 = 0.0;
  int bartlett_df = 0;
  double bartlett_p = 1.0;
  std::vector<double> eigenvalues;   // all L roots, descending
  std::vector<double> variance_pct;  // eigenvalue / L * 100 per root
  Mat loadings;                      // L x k, eigenvector scaled by sqrt(root)
  Mat rotated_loadings;              // varimax; empty when rotation refused
  bool singular = false;
};

// Pairwise-complete Pearson correlations; NaN cells are treated as missing.
// Throws DataError when a column is constant over its defined entries.
Mat pearson_correlation(const Mat& data);

// Sphericity statistic -(n - 1 - (2l + 5)/6) * ln(determinant).
double bartlett_chi2(int n, int l, double determinant);

// PCA of an N x L data matrix (N > L >= 2). Varimax rotates the first
// n_components loading columns (clamped to [1, L]); a singular correlation
// matrix reports determinant 0 and refuses the rotation.
PcaResult pca(const Mat& data, int n_components);

// Kaiser-normalized pairwise varimax; sweeps until the largest rotation
// angle falls below tol. Column signs canonicalized afterwards.
Mat varimax(const Mat& loadings, double tol = 1e-6, int max_sweeps = 100);

struct ParallelResult {
  int replications = 0;
  std::vector<double> mean_eigenvalues;
  std::vector<double> pct95_eigenvalues;  // nearest-rank 95th percentile
  int retained = 0;  // filled by retained_components against observed roots
};

// Horn parallel analysis: per replication an n x l standard-normal matrix,
// correlation eigenvalues, aggregated per root. Deterministic given seed;
// replication r uses the derived stream seed derive_seed(seed, r).
ParallelResult parallel_analysis(int n, int l, int replications, uint64_t seed);

// Count of roots whose observed eigenvalue exceeds the 95th-percentile
// envelope.
int retained_components(const std::vector<double>& observed, const ParallelResult& pa);

struct CttItem {
  std::string id;
  double scale_mean_if_deleted = 0.0;
  double scale_var_if_deleted = 0.0;       // sample variance
  double corrected_item_total = 0.0;       // item vs total minus the item
  double alpha_if_deleted = 0.0;           // NaN when fewer than 3 items
};

struct CttResult {
  double alpha = 0.0;
  double alpha_standardized = 0.0;
  int n_complete = 0;  // listwise cases used
  std::vector<CttItem> items;
};

// Classical summary on external scores (scored value + category floor),
// listwise deletion. Throws DataError when the total variance is zero.
CttResult ctt_summary(const ResponseMatrix& scored);

}  // namespace rascal
