#include "rascal/fit.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rascal {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Wilson-Hilferty: mean-square t, variance q^2 -> approximate unit normal.
double wilson_hilferty(double mnsq, double q2) {
  if (!(q2 > 0.0)) return 0.0;
  double q = std::sqrt(q2);
  return (std::cbrt(mnsq) - 1.0) * (3.0 / q) + q / 3.0;
}

struct Accum {
  double sq_z = 0.0;     // sum z^2
  double sq_raw = 0.0;   // sum (x-E)^2
  double sum_v = 0.0;    // sum V
  double out_q = 0.0;    // sum (C4/V^2 - 1)
  double in_q = 0.0;     // sum (C4 - V^2)
  long n = 0;

  void add(double z, double raw, const detail::CellMoments& mo) {
    sq_z += z * z;
    sq_raw += raw * raw;
    sum_v += mo.v;
    out_q += mo.c4 / (mo.v * mo.v) - 1.0;
    in_q += mo.c4 - mo.v * mo.v;
    ++n;
  }

  FitRecord record(const FitThresholds& th) const {
    FitRecord r;
    if (n == 0 || sum_v <= 0.0) return r;
    r.outfit_mnsq = sq_z / static_cast<double>(n);
    r.infit_mnsq = sq_raw / sum_v;
    r.outfit_zstd = wilson_hilferty(r.outfit_mnsq, out_q / (static_cast<double>(n) * n));
    r.infit_zstd = wilson_hilferty(r.infit_mnsq, in_q / (sum_v * sum_v));
    double worse_high = std::max(r.infit_mnsq, r.outfit_mnsq);
    double worse_low = std::min(r.infit_mnsq, r.outfit_mnsq);
    if (worse_high > th.underfit_mnsq)
      r.flag = FitFlag::Underfit;
    else if (worse_low < th.overfit_mnsq)
      r.flag = FitFlag::Overfit;
    r.advisory = worse_high > th.advisory_mnsq ||
                 std::abs(r.infit_zstd) > th.advisory_zstd ||
                 std::abs(r.outfit_zstd) > th.advisory_zstd;
    return r;
  }
};

}  // namespace

ResidualMatrix standardized_residuals(const ResponseMatrix& m, const Calibration& cal) {
  if (!m.scored) throw DataError("standardized_residuals requires a scored matrix");
  const int n = m.n_persons(), l = m.n_items();
  if (static_cast<int>(cal.persons.size()) != n || static_cast<int>(cal.items.size()) != l)
    throw DataError("calibration does not match the matrix dimensions");

  auto cum = detail::cumulative_tau(cal.structure.tau);
  ResidualMatrix out;
  out.z = Mat(n, l);
  out.raw = Mat(n, l);
  for (int v = 0; v < n; ++v)
    for (int i = 0; i < l; ++i) {
      if (m.is_missing(v, i)) {
        out.z(v, i) = kNaN;
        out.raw(v, i) = kNaN;
        continue;
      }
      auto mo = detail::rsm_moments(cal.persons[v].measure - cal.items[i].measure, cum);
      if (!(mo.v > 0.0)) throw std::domain_error("zero response variance at a defined cell");
      double raw = m.at(v, i) - mo.e;
      out.raw(v, i) = raw;
      out.z(v, i) = raw / std::sqrt(mo.v);
    }
  return out;
}

FitReport fit_statistics(const ResidualMatrix& residuals, const Calibration& cal,
                         const FitThresholds& thresholds) {
  const int n = residuals.z.rows, l = residuals.z.cols;
  if (static_cast<int>(cal.persons.size()) != n || static_cast<int>(cal.items.size()) != l)
    throw DataError("calibration does not match the residual dimensions");

  auto cum = detail::cumulative_tau(cal.structure.tau);
  std::vector<Accum> by_person(n), by_item(l);
  for (int v = 0; v < n; ++v)
    for (int i = 0; i < l; ++i) {
      double z = residuals.z(v, i);
      if (std::isnan(z)) continue;
      auto mo = detail::rsm_moments(cal.persons[v].measure - cal.items[i].measure, cum);
      by_person[v].add(z, residuals.raw(v, i), mo);
      by_item[i].add(z, residuals.raw(v, i), mo);
    }

  FitReport rep;
  rep.persons.reserve(n);
  rep.items.reserve(l);
  for (const auto& a : by_person) rep.persons.push_back(a.record(thresholds));
  for (const auto& a : by_item) rep.items.push_back(a.record(thresholds));
  return rep;
}

}  // namespace rascal
