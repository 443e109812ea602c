#include <cmath>
#include <vector>

#include "doctest.h"
#include "rascal/estimate.hpp"
#include "rascal/fit.hpp"
#include "rascal/matrix.hpp"
#include "rascal/simulate.hpp"

using namespace rascal;

namespace {

ResponseMatrix scored_matrix(const std::vector<std::vector<int>>& cells, int m) {
  ResponseMatrix r;
  int nv = static_cast<int>(cells.size());
  int ni = static_cast<int>(cells[0].size());
  for (int v = 0; v < nv; ++v) r.person_ids.push_back("P" + std::to_string(v + 1));
  for (int i = 0; i < ni; ++i) {
    r.item_ids.push_back("I" + std::to_string(i + 1));
    r.keys.push_back({r.item_ids.back(), Direction::Forward, 0, m});
  }
  for (const auto& row : cells)
    for (int x : row) r.cells.push_back(x);
  r.scored = true;
  return r;
}

std::pair<ResponseMatrix, Calibration> calibrated_sim(int n, uint64_t seed) {
  SimulateSpec sp;
  sp.n_persons = n;
  sp.deltas = {-0.52, -0.21, -0.09, 0.09, 0.19, 0.20, 0.34};
  sp.tau = {-0.21, 0.03, 0.19};
  sp.seed = seed;
  sp.min_category = 0;
  auto raw = simulate_matrix(sp);
  std::vector<ScoringKey> keys;
  for (const auto& id : raw.item_ids) keys.push_back({id, Direction::Forward, 0, 3});
  attach_keys(raw, keys);
  auto trimmed = trim_extremes(apply_scoring(raw)).first;
  auto cal = jmle_calibrate(trimmed);
  return {trimmed, cal};
}

}  // namespace

TEST_CASE("standardized residuals at p = 0.5 are exactly plus minus one") {
  // symmetric 2x2 calibrates everyone to the same measure, every p = 0.5
  auto m = scored_matrix({{1, 0}, {0, 1}}, 1);
  auto cal = jmle_calibrate(m);
  auto res = standardized_residuals(m, cal);
  CHECK(res.z(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(res.z(0, 1) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(res.z(1, 0) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(res.z(1, 1) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(res.raw(0, 0) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("standardized residual arithmetic") {
  // x = 3, E = 1.2, V = 0.8: z = 1.8/sqrt(0.8)
  double z = (3.0 - 1.2) / std::sqrt(0.8);
  CHECK(z == doctest::Approx(2.0125).epsilon(1e-4));

  auto [m, cal] = calibrated_sim(120, 41);
  auto res = standardized_residuals(m, cal);
  auto beta = cal.person_measures();
  auto delta = cal.item_measures();
  auto cum = detail::cumulative_tau(cal.structure.tau);
  for (int v = 0; v < m.n_persons(); v += 13)
    for (int i = 0; i < m.n_items(); ++i) {
      auto mo = detail::rsm_moments(beta[v] - delta[i], cum);
      CHECK(res.raw(v, i) == doctest::Approx(m.at(v, i) - mo.e).epsilon(1e-10));
      CHECK(res.z(v, i) ==
            doctest::Approx((m.at(v, i) - mo.e) / std::sqrt(mo.v)).epsilon(1e-10));
    }
}

TEST_CASE("residuals keep missing cells missing") {
  auto m = scored_matrix({{1, 0, 0}, {0, 1, 1}, {1, 1, 0}, {0, 0, 1}}, 1);
  m.at(0, 2) = kMissing;
  auto cal = jmle_calibrate(m);
  auto res = standardized_residuals(m, cal);
  CHECK(std::isnan(res.z(0, 2)));
  CHECK(std::isnan(res.raw(0, 2)));
  CHECK(std::isfinite(res.z(0, 1)));
  CHECK(std::isfinite(res.z(1, 2)));
}

TEST_CASE("per-person raw residuals sum to the score residual") {
  auto [m, cal] = calibrated_sim(150, 12);
  auto res = standardized_residuals(m, cal);
  for (int v = 0; v < m.n_persons(); ++v) {
    double s = 0;
    for (int i = 0; i < m.n_items(); ++i)
      if (!std::isnan(res.raw(v, i))) s += res.raw(v, i);
    CHECK(std::fabs(s) < 0.01);  // ties fit to the converged score equations
  }
}

TEST_CASE("unit residuals with equal weights give infit one") {
  auto m = scored_matrix({{1, 0}, {0, 1}}, 1);
  auto cal = jmle_calibrate(m);
  auto fit = fit_statistics(standardized_residuals(m, cal), cal);
  for (const auto& r : fit.items) {
    CHECK(r.infit_mnsq == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.outfit_mnsq == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.flag == FitFlag::Ok);
  }
}

TEST_CASE("infit is the information weighted form, outfit the plain mean") {
  auto [m, cal] = calibrated_sim(90, 77);
  auto res = standardized_residuals(m, cal);
  auto fit = fit_statistics(res, cal);
  auto beta = cal.person_measures();
  auto delta = cal.item_measures();
  auto cum = detail::cumulative_tau(cal.structure.tau);
  for (int i = 0; i < m.n_items(); ++i) {
    double sq = 0, wsum = 0, zsum = 0;
    int n = 0;
    for (int v = 0; v < m.n_persons(); ++v) {
      if (std::isnan(res.z(v, i))) continue;
      auto mo = detail::rsm_moments(beta[v] - delta[i], cum);
      sq += res.raw(v, i) * res.raw(v, i);
      wsum += mo.v;
      zsum += res.z(v, i) * res.z(v, i);
      ++n;
    }
    CHECK(fit.items[i].infit_mnsq == doctest::Approx(sq / wsum).epsilon(1e-10));
    CHECK(fit.items[i].outfit_mnsq == doctest::Approx(zsum / n).epsilon(1e-10));
    CHECK(fit.items[i].infit_mnsq >= 0.0);
    CHECK(fit.items[i].outfit_mnsq >= 0.0);
  }
}

TEST_CASE("model-conformant items stay inside the productive band") {
  auto [m, cal] = calibrated_sim(200, 6);
  auto fit = fit_statistics(standardized_residuals(m, cal), cal);
  for (const auto& r : fit.items) {
    CHECK(r.infit_mnsq > 0.8);
    CHECK(r.infit_mnsq < 1.2);
  }
}

TEST_CASE("classification thresholds") {
  FitThresholds th;
  Calibration cal;
  // 1.39/1.45: inside 0.5..1.5 so not underfit, but advisory (outfit > 1.4)
  FitRecord r;
  r.infit_mnsq = 1.39;
  r.outfit_mnsq = 1.45;
  double worse_high = std::max(r.infit_mnsq, r.outfit_mnsq);
  double worse_low = std::min(r.infit_mnsq, r.outfit_mnsq);
  CHECK_FALSE(worse_high > th.underfit_mnsq);
  CHECK_FALSE(worse_low < th.overfit_mnsq);
  CHECK(worse_high > th.advisory_mnsq);
}

TEST_CASE("flags fire on engineered misfit") {
  // conformant base, then one person answers uniformly at random
  SimulateSpec sp;
  sp.n_persons = 300;
  sp.deltas = {-0.52, -0.21, -0.09, 0.09, 0.19, 0.20, 0.34};
  sp.tau = {-0.21, 0.03, 0.19};
  sp.seed = 19;
  sp.min_category = 0;
  auto raw = simulate_matrix(sp);
  SplitMix64 rng(4242);
  for (int i = 0; i < raw.n_items(); ++i)
    raw.at(0, i) = static_cast<int>(rng.uniform() * 4);
  std::vector<ScoringKey> keys;
  for (const auto& id : raw.item_ids) keys.push_back({id, Direction::Forward, 0, 3});
  attach_keys(raw, keys);
  auto trimmed = trim_extremes(apply_scoring(raw)).first;
  auto cal = jmle_calibrate(trimmed);
  auto fit = fit_statistics(standardized_residuals(trimmed, cal), cal);

  // find that person in the retained order
  int idx = -1;
  for (size_t v = 0; v < cal.persons.size(); ++v)
    if (cal.persons[v].id == "P001") idx = static_cast<int>(v);
  if (idx >= 0) {
    const auto& r = fit.persons[idx];
    CHECK(r.outfit_mnsq > 1.0);
  }

  // overfit flag with a custom threshold band
  FitThresholds tight;
  tight.overfit_mnsq = 0.99;
  tight.underfit_mnsq = 1.01;
  auto strict = fit_statistics(standardized_residuals(trimmed, cal), cal, tight);
  bool any_under = false, any_over = false;
  for (const auto& r : strict.items) {
    if (r.flag == FitFlag::Underfit) any_under = true;
    if (r.flag == FitFlag::Overfit) any_over = true;
  }
  CHECK((any_under || any_over));
}

TEST_CASE("outfit reacts more than infit to a single outlier") {
  // far-off-target person: top category on the easiest items, then one
  // wildly unexpected bottom response injected into a conformant row
  auto [m0, cal0] = calibrated_sim(250, 33);
  auto fit0 = fit_statistics(standardized_residuals(m0, cal0), cal0);

  // pick the lowest-measure retained person and flip their hardest response
  int low = 0;
  for (size_t v = 1; v < cal0.persons.size(); ++v)
    if (cal0.persons[v].measure < cal0.persons[low].measure) low = static_cast<int>(v);
  auto m1 = m0;
  // hardest item where the response is not already at the top
  int hard = -1;
  for (int i = 0; i < m0.n_items(); ++i)
    if (m0.at(low, i) != 3 &&
        (hard < 0 || cal0.items[i].measure > cal0.items[hard].measure))
      hard = i;
  REQUIRE(hard >= 0);
  m1.at(low, hard) = 3;

  auto res1 = standardized_residuals(m1, cal0);
  auto fit1 = fit_statistics(res1, cal0);
  double d_out = fit1.persons[low].outfit_mnsq - fit0.persons[low].outfit_mnsq;
  double d_in = fit1.persons[low].infit_mnsq - fit0.persons[low].infit_mnsq;
  CHECK(d_out > d_in);
  CHECK(d_out > 0.0);
}

TEST_CASE("zstd centers near zero on conformant data") {
  auto [m, cal] = calibrated_sim(400, 55);
  auto fit = fit_statistics(standardized_residuals(m, cal), cal);
  double s = 0;
  for (const auto& r : fit.items) s += r.outfit_zstd;
  CHECK(std::fabs(s / fit.items.size()) < 1.5);
  for (const auto& r : fit.items) CHECK(std::isfinite(r.infit_zstd));
}

TEST_CASE("dimension mismatch is rejected") {
  auto [m, cal] = calibrated_sim(50, 2);
  auto wrong = scored_matrix({{1, 0}, {0, 1}}, 1);
  CHECK_THROWS_AS(standardized_residuals(wrong, cal), DataError);
}
