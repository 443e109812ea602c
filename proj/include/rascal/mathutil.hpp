// Shared numeric utilities: stable logistic forms, a small dense matrix,
// a cyclic Jacobi symmetric eigensolver, chi-square tail probability,
// monotone root finding, and a counter-based reproducible RNG (splitmix64).
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace rascal {

constexpr double kPi = 3.14159265358979323846;

// e^x / (1 + e^x), stable for large |x|
double logistic(double x);

// ln(1 + e^x) without overflow
double log1pexp(double x);

// Dense row-major matrix for the small problems handled here (L x L
// correlation matrices, L x k loading matrices).
struct Mat {
  int rows = 0, cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

  double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
  bool empty() const { return data.empty(); }
};

struct SymEigen {
  std::vector<double> values;  // descending
  Mat vectors;                 // column j is the eigenvector for values[j]
};

// Cyclic Jacobi rotations on a symmetric matrix. Iterates until the
// off-diagonal Frobenius norm falls below tol relative to the matrix scale.
// Eigenvector signs are canonicalized (largest-|component| positive).
SymEigen jacobi_eigen(Mat a, double tol = 1e-12, int max_sweeps = 200);

// Inverse from an eigendecomposition. Sets *singular (if given) when the
// condition of the matrix exceeds 1/rcond; the returned matrix is then empty.
Mat sym_inverse(const SymEigen& e, double rcond = 1e-12, bool* singular = nullptr);

// Upper-tail probability P(X > x) for a chi-square with df degrees of freedom.
double chi2_upper_tail(double x, double df);

double mean(const std::vector<double>& v);
double variance_pop(const std::vector<double>& v);     // divide by n
double variance_sample(const std::vector<double>& v);  // divide by n-1
double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Bisection for f strictly increasing: returns x in [lo, hi] with
// |f(x) - target| < ftol (or the midpoint once the bracket is exhausted).
double solve_increasing(const std::function<double(double)>& f, double target, double lo,
                        double hi, double ftol = 1e-10, int max_iter = 240);

// Counter-based 64-bit generator (splitmix64 output function). Bit-identical
// across platforms; normal deviates via Box-Muller on (0,1) uniforms.
struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform on (0,1): 53-bit mantissa, offset so 0 never occurs
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53 + 0x1.0p-54; }

  double normal();

 private:
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Derive an independent stream seed (e.g. one per replication).
uint64_t derive_seed(uint64_t seed, uint64_t stream);

}  // namespace rascal
