#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "rascal/mathutil.hpp"

using namespace rascal;

TEST_CASE("logistic basics") {
  CHECK(logistic(0.0) == doctest::Approx(0.5));
  CHECK(logistic(800.0) == doctest::Approx(1.0));
  CHECK(logistic(-800.0) == doctest::Approx(0.0));
  // complementary symmetry
  for (double x : {-3.7, -0.2, 0.9, 11.0})
    CHECK(logistic(x) + logistic(-x) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("log1pexp stable at both tails") {
  CHECK(log1pexp(0.0) == doctest::Approx(std::log(2.0)));
  CHECK(log1pexp(-745.0) == doctest::Approx(0.0));
  CHECK(log1pexp(1000.0) == doctest::Approx(1000.0));
  CHECK(std::isfinite(log1pexp(700.0)));
}

TEST_CASE("jacobi eigen on a 2x2 with known roots") {
  // [[2,1],[1,2]] has eigenvalues 3 and 1 with vectors (1,1)/sqrt2, (1,-1)/sqrt2
  Mat a(2, 2);
  a(0, 0) = 2; a(0, 1) = 1; a(1, 0) = 1; a(1, 1) = 2;
  auto e = jacobi_eigen(a);
  REQUIRE(e.values.size() == 2);
  CHECK(e.values[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(e.values[1] == doctest::Approx(1.0).epsilon(1e-12));
  double s = 1.0 / std::sqrt(2.0);
  CHECK(std::fabs(e.vectors(0, 0)) == doctest::Approx(s));
  CHECK(std::fabs(e.vectors(1, 0)) == doctest::Approx(s));
  // canonical sign: largest-|component| positive
  CHECK(std::max(e.vectors(0, 0), e.vectors(1, 0)) > 0.0);
}

TEST_CASE("jacobi eigen identity and reconstruction") {
  const int n = 5;
  Mat a(n, n);
  for (int i = 0; i < n; ++i) a(i, i) = 1.0;
  auto e = jacobi_eigen(a);
  for (double v : e.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

  // random symmetric: A == V diag(w) V^T and V orthonormal
  SplitMix64 rng(42);
  Mat b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) b(i, j) = b(j, i) = rng.normal();
  auto eb = jacobi_eigen(b);
  CHECK(std::is_sorted(eb.values.rbegin(), eb.values.rend()));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double rec = 0, dot = 0;
      for (int k = 0; k < n; ++k) {
        rec += eb.vectors(i, k) * eb.values[k] * eb.vectors(j, k);
        dot += eb.vectors(k, i) * eb.vectors(k, j);
      }
      CHECK(rec == doctest::Approx(b(i, j)).epsilon(1e-8));
      CHECK(dot == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-8));
    }
  }

  // trace is conserved
  double tr = 0, sum = 0;
  for (int i = 0; i < n; ++i) tr += b(i, i);
  for (double v : eb.values) sum += v;
  CHECK(sum == doctest::Approx(tr).epsilon(1e-10));
}

TEST_CASE("sym_inverse inverts and flags singularity") {
  Mat a(2, 2);
  a(0, 0) = 2; a(0, 1) = 1; a(1, 0) = 1; a(1, 1) = 2;
  bool sing = true;
  auto inv = sym_inverse(jacobi_eigen(a), 1e-12, &sing);
  CHECK_FALSE(sing);
  // inverse of [[2,1],[1,2]] is [[2,-1],[-1,2]]/3
  CHECK(inv(0, 0) == doctest::Approx(2.0 / 3).epsilon(1e-10));
  CHECK(inv(0, 1) == doctest::Approx(-1.0 / 3).epsilon(1e-10));

  Mat r(2, 2);
  r(0, 0) = r(1, 1) = 1.0;
  r(0, 1) = r(1, 0) = 1.0;  // perfectly collinear
  auto bad = sym_inverse(jacobi_eigen(r), 1e-12, &sing);
  CHECK(sing);
  CHECK(bad.empty());
}

TEST_CASE("chi2 upper tail against reference values") {
  // scipy.stats.chi2.sf(3.84, 1), .sf(21, 21), .sf(0, 5)
  CHECK(chi2_upper_tail(3.84, 1) == doctest::Approx(0.05004352).epsilon(1e-5));
  CHECK(chi2_upper_tail(21.0, 21) == doctest::Approx(0.4589442).epsilon(1e-5));
  CHECK(chi2_upper_tail(0.0, 5) == doctest::Approx(1.0));
  CHECK(chi2_upper_tail(1e4, 21) == doctest::Approx(0.0));
}

TEST_CASE("moment helpers") {
  std::vector<double> v{1, 2, 3, 4};
  CHECK(mean(v) == doctest::Approx(2.5));
  CHECK(variance_pop(v) == doctest::Approx(1.25));
  CHECK(variance_sample(v) == doctest::Approx(5.0 / 3));
  std::vector<double> y{2, 4, 6, 8};
  CHECK(pearson(v, y) == doctest::Approx(1.0));
  std::vector<double> z{4, 3, 2, 1};
  CHECK(pearson(v, z) == doctest::Approx(-1.0));
}

TEST_CASE("solve_increasing finds the preimage") {
  auto f = [](double x) { return x * x * x; };
  double r = solve_increasing(f, 8.0, 0.0, 10.0);
  CHECK(r == doctest::Approx(2.0).epsilon(1e-8));
  r = solve_increasing([](double x) { return logistic(x); }, 0.75, -10, 10);
  CHECK(r == doctest::Approx(std::log(3.0)).epsilon(1e-8));
}

TEST_CASE("splitmix64 reference stream") {
  // first outputs for seed 1234567: python3 -c "
  //   x=1234567
  //   for _ in range(3):
  //     x=(x+0x9E3779B97F4A7C15)%2**64; z=x
  //     z=((z^(z>>30))*0xBF58476D1CE4E5B9)%2**64
  //     z=((z^(z>>27))*0x94D049BB133111EB)%2**64
  //     print(z^(z>>31))"
  SplitMix64 g(1234567);
  CHECK(g.next() == 6457827717110365317ULL);
  CHECK(g.next() == 3203168211198807973ULL);
  CHECK(g.next() == 9817491932198370423ULL);
}

TEST_CASE("splitmix64 uniform stays inside the open interval") {
  SplitMix64 g(99);
  for (int i = 0; i < 10000; ++i) {
    double u = g.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("splitmix64 normal moments") {
  SplitMix64 g(7);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    double x = g.normal();
    s += x;
    s2 += x * x;
  }
  double m = s / n;
  CHECK(m == doctest::Approx(0.0).epsilon(0.02));
  CHECK(std::fabs(s2 / n - m * m - 1.0) < 0.02);
}

TEST_CASE("derive_seed yields distinct decorrelated streams") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 5) != derive_seed(2, 5));
  // same inputs, same stream
  SplitMix64 a(derive_seed(3, 4)), b(derive_seed(3, 4));
  for (int i = 0; i < 16; ++i) CHECK(a.next() == b.next());
}
