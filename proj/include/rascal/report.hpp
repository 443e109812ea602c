// Fixed-width text rendering in the style of classic calibration printouts:
// Wright variable maps, category-structure summary, misfit-ordered item
// table, category characteristic curve data.
#pragma once

#include <string>
#include <vector>

#include "rascal/estimate.hpp"
#include "rascal/fit.hpp"
#include "rascal/matrix.hpp"

namespace rascal {

// Display rule: stored full-precision values rounded half-away-from-zero.
namespace fmt {
std::string num2(double x);   // 2 decimals
std::string zstd1(double x);  // 1 decimal, capped to +-9.9
std::string pct0(double x);   // whole percent
std::string pct1(double x);   // 1-decimal percent
}  // namespace fmt

struct CategoryRow {
  int label = 0;       // external category code
  long count = 0;
  double sample_pct = 0.0;
  double obs_avg = 0.0;  // mean beta - delta over observations in the category
  double exp_avg = 0.0;  // model expectation of that average
  double infit = 0.0;
  double outfit = 0.0;
  bool has_andrich = false;  // the bottom category has no threshold
  double andrich = 0.0;
  double andrich_se = 0.0;
  double cat_measure = 0.0;
  bool extreme = false;  // displayed parenthesized
  double zone_lo = 0.0, zone_hi = 0.0;  // score-to-measure zone, +-inf at ends
  bool has_cum50 = false;
  double cum50 = 0.0;       // 50% cumulative (Thurstone) threshold
  bool disordered = false;  // observed average fell below the previous row
};

std::vector<CategoryRow> category_rows(const ResponseMatrix& scored, const Calibration& cal);
std::string render_category_table(const std::vector<CategoryRow>& rows);

struct MisfitRow {
  int entry = 0;  // 1-based original column position
  double total = 0.0;  // external raw score
  int count = 0;
  double measure = 0.0;
  double se = 0.0;
  FitRecord fit;
  double ptmeas_obs = 0.0;
  double ptmeas_exp = 0.0;
  double exact_obs_pct = 0.0;
  double exact_exp_pct = 0.0;
  std::string id;
};

// Sorted by descending max(|INFIT-1|, |OUTFIT-1|), stable on ties.
std::vector<MisfitRow> misfit_rows(const ResponseMatrix& scored, const Calibration& cal,
                                   const FitReport& fit);
std::string render_misfit_table(const std::vector<MisfitRow>& rows);

enum class MapVariant {
  Simple,      // items at their difficulty
  Thresholds,  // three item columns: bottom 50% threshold, difficulty, top
};

// Persons histogrammed against items on a shared logit rule, highest measure
// on top. '#' stands for glyph_scale persons (ceil of the tallest bin / 40),
// '.' for a remainder. M/S/T mark mean and 1 and 2 SDs of each distribution.
std::string render_wright_map(const Calibration& cal, double bin_width = 0.1,
                              MapVariant variant = MapVariant::Simple);

// CSV rows (beta-delta, pi_0..pi_m) over the grid; probabilities sum to 1.
std::string emit_category_curves(const Calibration& cal, double lo = -4.0, double hi = 4.0,
                                 double step = 0.05);

}  // namespace rascal
