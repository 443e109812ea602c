// Residual-based fit assessment: standardized residuals, INFIT/OUTFIT
// mean-squares, ZSTD transforms, and cutoff classification.
#pragma once

#include <vector>

#include "rascal/estimate.hpp"
#include "rascal/mathutil.hpp"
#include "rascal/matrix.hpp"

namespace rascal {

struct ResidualMatrix {
  Mat z;    // standardized (x - E)/sqrt(V), NaN where missing
  Mat raw;  // score-unit x - E, NaN where missing
};

enum class FitFlag { Ok, Overfit, Underfit };

struct FitRecord {
  double infit_mnsq = 1.0;
  double outfit_mnsq = 1.0;
  double infit_zstd = 0.0;
  double outfit_zstd = 0.0;
  FitFlag flag = FitFlag::Ok;
  bool advisory = false;  // large mean-square or |ZSTD|, see FitThresholds
};

struct FitThresholds {
  double underfit_mnsq = 1.5;
  double overfit_mnsq = 0.5;
  double advisory_mnsq = 1.4;
  double advisory_zstd = 2.0;
};

struct FitReport {
  std::vector<FitRecord> persons;
  std::vector<FitRecord> items;
};

// z_vi = (x_vi - E_vi)/sqrt(V_vi); missing cells stay NaN.
ResidualMatrix standardized_residuals(const ResponseMatrix& scored, const Calibration& cal);

// Item INFIT = sum_v V z^2 / sum_v V (information weighted), OUTFIT = mean
// of z^2; person statistics transpose the sums. ZSTD is the Wilson-Hilferty
// cube-root transform with the mean-square variance accumulated per defined
// cell. Flags: underfit when the worse mean-square exceeds 1.5, overfit when
// below 0.5; advisory when any mean-square tops 1.4 or |ZSTD| tops 2.0.
FitReport fit_statistics(const ResidualMatrix& residuals, const Calibration& cal,
                         const FitThresholds& thresholds = {});

}  // namespace rascal
