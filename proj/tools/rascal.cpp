// rascal: rating-scale calibration toolkit. Subcommands cover the full
// pipeline from raw CSV to calibrated measures, fit tables, dimensionality
// diagnostics, and fixed-width reports. All randomness flows from --seed
// (or RASCAL_SEED), so identical configs produce byte-identical artifacts.
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rascal/diag.hpp"
#include "rascal/estimate.hpp"
#include "rascal/fit.hpp"
#include "rascal/matrix.hpp"
#include "rascal/model.hpp"
#include "rascal/report.hpp"
#include "rascal/simulate.hpp"

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitData = 2;
constexpr int kExitNoConverge = 3;

struct Options {
  std::string input, keys, out = ".";
  double tolerance = 1e-3;
  int max_iter = 100;
  double damping = 1.0;
  bool bias_correction = false;
  std::optional<uint64_t> seed;
  int reps = 100;
  std::string pca_on = "residuals";
  int components = 2;
  std::string format = "text";
  double bin_width = 0.1;
};

uint64_t effective_seed(const Options& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("RASCAL_SEED")) {
    std::string s(env);
    try {
      size_t pos = 0;
      uint64_t v = std::stoull(s, &pos);
      if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw rascal::DataError("RASCAL_SEED is not an unsigned integer: " + s);
  }
  return 1;
}

rascal::EstimateConfig estimate_config(const Options& o) {
  rascal::EstimateConfig cfg;
  cfg.tolerance = o.tolerance;
  cfg.max_iter = o.max_iter;
  cfg.damping = o.damping;
  cfg.bias_correction = o.bias_correction;
  return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw rascal::DataError("cannot write " + path.string());
  f << content;
}

// ---- pipeline ----

struct Pipeline {
  rascal::ResponseMatrix scored;   // full scored matrix (pre-trim)
  rascal::ResponseMatrix trimmed;
  rascal::TrimLog trimlog;
  rascal::Calibration cal;
};

rascal::ResponseMatrix load_scored(const Options& o) {
  if (o.input.empty() || o.keys.empty())
    throw rascal::DataError("--input and --keys are required for this command");
  rascal::ResponseMatrix raw = rascal::load_response_csv(o.input);
  rascal::attach_keys(raw, rascal::load_keys_csv(o.keys));
  return rascal::apply_scoring(raw);
}

Pipeline run_calibration(const Options& o) {
  Pipeline p;
  p.scored = load_scored(o);
  auto [trimmed, log] = rascal::trim_extremes(p.scored);
  p.trimmed = std::move(trimmed);
  p.trimlog = log;
  p.cal = rascal::jmle_calibrate(p.trimmed, estimate_config(o));
  return p;
}

// ---- JSON shapes ----

ordered_json trim_json(const rascal::TrimLog& log) {
  ordered_json removed_p = ordered_json::array(), removed_i = ordered_json::array();
  for (const auto& [id, why] : log.removed_persons)
    removed_p.push_back({{"id", id}, {"reason", rascal::to_string(why)}});
  for (const auto& [id, why] : log.removed_items)
    removed_i.push_back({{"id", id}, {"reason", rascal::to_string(why)}});
  return {{"passes", log.passes},
          {"removed_persons", removed_p},
          {"removed_items", removed_i}};
}

ordered_json calibration_json(const Options& o, const Pipeline& p) {
  ordered_json persons = ordered_json::array(), items = ordered_json::array();
  for (const auto& r : p.cal.persons)
    persons.push_back({{"id", r.id},
                       {"raw", r.raw},
                       {"count", r.count},
                       {"measure", r.measure},
                       {"se", r.se}});
  for (const auto& r : p.cal.items)
    items.push_back(
        {{"id", r.id}, {"raw", r.raw}, {"count", r.count}, {"measure", r.measure}, {"se", r.se}});
  ordered_json steps = ordered_json::array();
  for (const auto& s : p.cal.trace.steps)
    steps.push_back({{"max_dbeta", s.max_dbeta},
                     {"max_ddelta", s.max_ddelta},
                     {"max_dtau", s.max_dtau},
                     {"loglik", s.loglik}});
  return {{"config",
           {{"tolerance", o.tolerance},
            {"max_iter", o.max_iter},
            {"damping", o.damping},
            {"bias_correction", o.bias_correction}}},
          {"trim", trim_json(p.trimlog)},
          {"max_score", p.cal.max_score},
          {"persons", persons},
          {"items", items},
          {"structure",
           {{"tau", p.cal.structure.tau},
            {"tau_se", p.cal.structure.tau_se},
            {"thurstone", p.cal.structure.thurstone},
            {"category_measures", p.cal.structure.category_measures},
            {"observed_counts", p.cal.structure.observed_counts}}},
          {"trace",
           {{"converged", p.cal.trace.converged},
            {"iterations", p.cal.trace.iterations},
            {"steps", steps}}}};
}

const char* flag_name(rascal::FitFlag f) {
  switch (f) {
    case rascal::FitFlag::Overfit: return "overfit";
    case rascal::FitFlag::Underfit: return "underfit";
    default: return "ok";
  }
}

ordered_json fit_json(const Pipeline& p, const rascal::FitReport& rep) {
  auto block = [](const auto& records, const auto& id_of) {
    ordered_json arr = ordered_json::array();
    for (size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      arr.push_back({{"id", id_of(i)},
                     {"infit_mnsq", r.infit_mnsq},
                     {"infit_zstd", r.infit_zstd},
                     {"outfit_mnsq", r.outfit_mnsq},
                     {"outfit_zstd", r.outfit_zstd},
                     {"flag", flag_name(r.flag)},
                     {"advisory", r.advisory}});
    }
    return arr;
  };
  return {{"persons", block(rep.persons, [&](size_t i) { return p.cal.persons[i].id; })},
          {"items", block(rep.items, [&](size_t i) { return p.cal.items[i].id; })}};
}

std::string residuals_csv(const Pipeline& p, const rascal::ResidualMatrix& res) {
  std::ostringstream os;
  os << "person_id";
  for (const auto& id : p.trimmed.item_ids) os << ',' << id;
  os << '\n';
  char buf[32];
  for (int v = 0; v < res.z.rows; ++v) {
    os << p.trimmed.person_ids[v];
    for (int i = 0; i < res.z.cols; ++i) {
      os << ',';
      if (!std::isnan(res.z(v, i))) {
        std::snprintf(buf, sizeof buf, "%.6f", res.z(v, i));
        os << buf;
      }
    }
    os << '\n';
  }
  return os.str();
}

ordered_json category_json(const std::vector<rascal::CategoryRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json j{{"label", r.label},
                   {"count", r.count},
                   {"sample_pct", r.sample_pct},
                   {"observed_average", r.obs_avg},
                   {"expected_average", r.exp_avg},
                   {"infit_mnsq", r.infit},
                   {"outfit_mnsq", r.outfit},
                   {"category_measure", r.cat_measure},
                   {"extreme", r.extreme},
                   {"zone", {r.zone_lo, r.zone_hi}},
                   {"disordered", r.disordered}};
    if (r.has_andrich) {
      j["andrich_threshold"] = r.andrich;
      j["andrich_se"] = r.andrich_se;
    }
    if (r.has_cum50) j["cumulative_50pct"] = r.cum50;
    arr.push_back(j);
  }
  return arr;
}

std::string category_csv(const std::vector<rascal::CategoryRow>& rows) {
  std::ostringstream os;
  os << "label,count,sample_pct,observed_average,expected_average,infit_mnsq,outfit_mnsq,"
        "andrich_threshold,andrich_se,category_measure,zone_lo,zone_hi,cumulative_50pct\n";
  char buf[32];
  auto num = [&](double x) {
    if (std::isnan(x) || std::isinf(x)) return std::string();
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return std::string(buf);
  };
  for (const auto& r : rows) {
    os << r.label << ',' << r.count << ',' << num(r.sample_pct) << ',' << num(r.obs_avg) << ','
       << num(r.exp_avg) << ',' << num(r.infit) << ',' << num(r.outfit) << ','
       << (r.has_andrich ? num(r.andrich) : "") << ',' << (r.has_andrich ? num(r.andrich_se) : "")
       << ',' << num(r.cat_measure) << ',' << num(r.zone_lo) << ',' << num(r.zone_hi) << ','
       << (r.has_cum50 ? num(r.cum50) : "") << '\n';
  }
  return os.str();
}

ordered_json misfit_json(const std::vector<rascal::MisfitRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows)
    arr.push_back({{"entry", r.entry},
                   {"id", r.id},
                   {"total_score", r.total},
                   {"count", r.count},
                   {"measure", r.measure},
                   {"se", r.se},
                   {"infit_mnsq", r.fit.infit_mnsq},
                   {"infit_zstd", r.fit.infit_zstd},
                   {"outfit_mnsq", r.fit.outfit_mnsq},
                   {"outfit_zstd", r.fit.outfit_zstd},
                   {"flag", flag_name(r.fit.flag)},
                   {"advisory", r.fit.advisory},
                   {"ptmeasure_observed", r.ptmeas_obs},
                   {"ptmeasure_expected", r.ptmeas_exp},
                   {"exact_match_obs_pct", r.exact_obs_pct},
                   {"exact_match_exp_pct", r.exact_exp_pct}});
  return arr;
}

std::string misfit_csv(const std::vector<rascal::MisfitRow>& rows) {
  std::ostringstream os;
  os << "entry,id,total_score,count,measure,se,infit_mnsq,infit_zstd,outfit_mnsq,outfit_zstd,"
        "flag,ptmeasure_observed,ptmeasure_expected,exact_match_obs_pct,exact_match_exp_pct\n";
  char buf[32];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return std::string(buf);
  };
  for (const auto& r : rows)
    os << r.entry << ',' << r.id << ',' << num(r.total) << ',' << r.count << ','
       << num(r.measure) << ',' << num(r.se) << ',' << num(r.fit.infit_mnsq) << ','
       << num(r.fit.infit_zstd) << ',' << num(r.fit.outfit_mnsq) << ','
       << num(r.fit.outfit_zstd) << ',' << flag_name(r.fit.flag) << ',' << num(r.ptmeas_obs)
       << ',' << num(r.ptmeas_exp) << ',' << num(r.exact_obs_pct) << ','
       << num(r.exact_exp_pct) << '\n';
  return os.str();
}

ordered_json parallel_json(int n, int l, const Options& o, const rascal::ParallelResult& pa) {
  return {{"n", n},
          {"l", l},
          {"replications", pa.replications},
          {"seed", effective_seed(o)},
          {"rng", "splitmix64"},
          {"percentile", "nearest-rank 95th"},
          {"mean_eigenvalues", pa.mean_eigenvalues},
          {"pct95_eigenvalues", pa.pct95_eigenvalues}};
}

ordered_json pca_json(const Options& o, const rascal::PcaResult& r, int n_rows,
                      const rascal::ParallelResult& pa, int retained) {
  auto mat = [](const rascal::Mat& m) {
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < m.rows; ++i) {
      ordered_json row = ordered_json::array();
      for (int j = 0; j < m.cols; ++j) row.push_back(m(i, j));
      rows.push_back(row);
    }
    return rows;
  };
  int gt1 = 0, gt14 = 0;
  for (double v : r.eigenvalues) {
    if (v > 1.0) ++gt1;
    if (v > 1.4) ++gt14;
  }
  return {{"mode", o.pca_on},
          {"n", n_rows},
          {"l", static_cast<int>(r.eigenvalues.size())},
          {"determinant", r.determinant},
          {"kmo", r.kmo},
          {"bartlett", {{"chi2", r.bartlett_chi2}, {"df", r.bartlett_df}, {"p", r.bartlett_p}}},
          {"singular", r.singular},
          {"eigenvalues", r.eigenvalues},
          {"variance_pct", r.variance_pct},
          {"loadings", mat(r.loadings)},
          {"rotated_loadings", mat(r.rotated_loadings)},
          {"correlation", mat(r.correlation)},
          // parallel-analysis retention decides; the 1.0 and 1.4 conventions
          // are reported, never applied
          {"retained_parallel", retained},
          {"eigenvalues_above_1_0", gt1},
          {"eigenvalues_above_1_4", gt14},
          {"parallel",
           {{"replications", pa.replications},
            {"seed", effective_seed(o)},
            {"rng", "splitmix64"},
            {"mean_eigenvalues", pa.mean_eigenvalues},
            {"pct95_eigenvalues", pa.pct95_eigenvalues}}}};
}

std::string scree_csv(const std::vector<double>& observed, const rascal::ParallelResult& pa) {
  std::ostringstream os;
  os << "root,observed,mean_random,pct95_random\n";
  char buf[32];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return std::string(buf);
  };
  for (size_t j = 0; j < observed.size(); ++j)
    os << j + 1 << ',' << num(observed[j]) << ',' << num(pa.mean_eigenvalues[j]) << ','
       << num(pa.pct95_eigenvalues[j]) << '\n';
  return os.str();
}

ordered_json ctt_json(const rascal::CttResult& r) {
  ordered_json items = ordered_json::array();
  for (const auto& it : r.items)
    items.push_back({{"id", it.id},
                     {"scale_mean_if_deleted", it.scale_mean_if_deleted},
                     {"scale_var_if_deleted", it.scale_var_if_deleted},
                     {"corrected_item_total", it.corrected_item_total},
                     {"alpha_if_deleted", it.alpha_if_deleted}});
  return {{"alpha", r.alpha},
          {"alpha_standardized", r.alpha_standardized},
          {"n_complete", r.n_complete},
          {"items", items}};
}

std::string ctt_text(const rascal::CttResult& r) {
  std::ostringstream os;
  size_t idw = 4;
  for (const auto& it : r.items) idw = std::max(idw, it.id.size());
  os << "RELIABILITY\n";
  os << "  Cronbach's alpha:    " << rascal::fmt::num2(r.alpha) << '\n';
  os << "  Standardized alpha:  " << rascal::fmt::num2(r.alpha_standardized) << '\n';
  os << "  Complete cases:      " << r.n_complete << "\n\n";
  os << "ITEM-TOTAL STATISTICS\n";
  os << "  " << std::setw(static_cast<int>(idw)) << std::left << "ITEM" << std::right
     << "  SCALE MEAN  SCALE VAR   CORRECTED       ALPHA\n";
  os << "  " << std::setw(static_cast<int>(idw)) << ' '
     << "  IF DELETED  IF DELETED  ITEM-TOTAL  IF DELETED\n";
  for (const auto& it : r.items) {
    os << "  " << std::setw(static_cast<int>(idw)) << std::left << it.id << std::right
       << std::setw(12) << rascal::fmt::num2(it.scale_mean_if_deleted) << std::setw(12)
       << rascal::fmt::num2(it.scale_var_if_deleted) << std::setw(12)
       << rascal::fmt::num2(it.corrected_item_total) << std::setw(12)
       << rascal::fmt::num2(it.alpha_if_deleted) << '\n';
  }
  return os.str();
}

// ---- score matrix for PCA ----

rascal::Mat score_data(const rascal::ResponseMatrix& scored) {
  rascal::Mat d(scored.n_persons(), scored.n_items());
  for (int v = 0; v < scored.n_persons(); ++v)
    for (int i = 0; i < scored.n_items(); ++i)
      d(v, i) = scored.is_missing(v, i) ? std::numeric_limits<double>::quiet_NaN()
                                        : static_cast<double>(scored.at(v, i));
  return d;
}

// ---- command bodies (return exit code) ----

int finish_calibrated(const Pipeline& p) {
  return p.cal.trace.converged ? 0 : kExitNoConverge;
}

int cmd_calibrate(const Options& o) {
  Pipeline p = run_calibration(o);
  ordered_json j = calibration_json(o, p);
  write_file(fs::path(o.out) / "calibration.json", j.dump(2) + "\n");
  if (o.format == "json") {
    std::cout << j.dump(2) << '\n';
  } else if (o.format == "csv") {
    std::cout << "id,raw,count,measure,se\n";
    for (const auto& r : p.cal.items)
      std::cout << r.id << ',' << r.raw << ',' << r.count << ',' << r.measure << ',' << r.se
                << '\n';
  } else {
    std::cout << "Converged: " << (p.cal.trace.converged ? "yes" : "NO") << " after "
              << p.cal.trace.iterations << " iterations\n";
    std::cout << "Persons " << p.cal.persons.size() << ", items " << p.cal.items.size()
              << ", trimmed " << p.trimlog.removed_persons.size() << " persons / "
              << p.trimlog.removed_items.size() << " items in " << p.trimlog.passes
              << " passes\n\n";
    std::cout << "  ITEM       MEASURE    S.E.\n";
    for (const auto& r : p.cal.items)
      std::cout << "  " << r.id << std::string(r.id.size() < 9 ? 9 - r.id.size() : 1, ' ')
                << rascal::fmt::num2(r.measure) << "    " << rascal::fmt::num2(r.se) << '\n';
  }
  return finish_calibrated(p);
}

int cmd_fit(const Options& o) {
  Pipeline p = run_calibration(o);
  auto res = rascal::standardized_residuals(p.trimmed, p.cal);
  auto rep = rascal::fit_statistics(res, p.cal);
  auto rows = rascal::misfit_rows(p.trimmed, p.cal, rep);
  write_file(fs::path(o.out) / "fit.json", fit_json(p, rep).dump(2) + "\n");
  write_file(fs::path(o.out) / "residuals.csv", residuals_csv(p, res));
  write_file(fs::path(o.out) / "misfit_table.txt", rascal::render_misfit_table(rows));
  if (o.format == "json")
    std::cout << misfit_json(rows).dump(2) << '\n';
  else if (o.format == "csv")
    std::cout << misfit_csv(rows);
  else
    std::cout << rascal::render_misfit_table(rows);
  return finish_calibrated(p);
}

int cmd_category(const Options& o) {
  Pipeline p = run_calibration(o);
  auto rows = rascal::category_rows(p.trimmed, p.cal);
  write_file(fs::path(o.out) / "category_table.txt", rascal::render_category_table(rows));
  write_file(fs::path(o.out) / "category_curves.csv", rascal::emit_category_curves(p.cal));
  if (o.format == "json")
    std::cout << category_json(rows).dump(2) << '\n';
  else if (o.format == "csv")
    std::cout << category_csv(rows);
  else
    std::cout << rascal::render_category_table(rows);
  return finish_calibrated(p);
}

int cmd_map(const Options& o) {
  Pipeline p = run_calibration(o);
  std::string simple = rascal::render_wright_map(p.cal, o.bin_width, rascal::MapVariant::Simple);
  std::string thresh =
      rascal::render_wright_map(p.cal, o.bin_width, rascal::MapVariant::Thresholds);
  write_file(fs::path(o.out) / "wright_map.txt", simple);
  write_file(fs::path(o.out) / "wright_map_thresholds.txt", thresh);
  std::cout << simple;
  return finish_calibrated(p);
}

int cmd_pca(const Options& o) {
  rascal::Mat data;
  bool converged = true;
  if (o.pca_on == "residuals") {
    Pipeline p = run_calibration(o);
    converged = p.cal.trace.converged;
    data = rascal::standardized_residuals(p.trimmed, p.cal).z;
  } else {
    data = score_data(load_scored(o));
  }
  auto r = rascal::pca(data, o.components);
  auto pa = rascal::parallel_analysis(data.rows, data.cols, o.reps, effective_seed(o));
  int retained = rascal::retained_components(r.eigenvalues, pa);
  write_file(fs::path(o.out) / "pca.json", pca_json(o, r, data.rows, pa, retained).dump(2) + "\n");
  write_file(fs::path(o.out) / "parallel.json",
             parallel_json(data.rows, data.cols, o, pa).dump(2) + "\n");
  write_file(fs::path(o.out) / "scree.csv", scree_csv(r.eigenvalues, pa));
  if (o.format == "json") {
    std::cout << pca_json(o, r, data.rows, pa, retained).dump(2) << '\n';
  } else if (o.format == "csv") {
    std::cout << scree_csv(r.eigenvalues, pa);
  } else {
    std::cout << "PCA (" << o.pca_on << "), " << data.rows << " x " << data.cols << '\n';
    std::cout << "  Determinant: " << r.determinant << '\n';
    std::cout << "  KMO:         " << rascal::fmt::num2(r.kmo) << '\n';
    std::cout << "  Bartlett:    chi2 " << rascal::fmt::num2(r.bartlett_chi2) << ", df "
              << r.bartlett_df << ", p " << (r.bartlett_p < 0.001 ? "<.001" : "") << '\n';
    std::cout << "  ROOT  OBSERVED  RANDOM-MEAN  RANDOM-95%\n";
    for (size_t j = 0; j < r.eigenvalues.size(); ++j)
      std::cout << "  " << j + 1 << "     " << rascal::fmt::num2(r.eigenvalues[j]) << "      "
                << rascal::fmt::num2(pa.mean_eigenvalues[j]) << "         "
                << rascal::fmt::num2(pa.pct95_eigenvalues[j]) << '\n';
    std::cout << "  Retained by parallel analysis: " << retained << '\n';
  }
  return converged ? 0 : kExitNoConverge;
}

int cmd_parallel(const Options& o, int n, int l) {
  auto pa = rascal::parallel_analysis(n, l, o.reps, effective_seed(o));
  ordered_json j = parallel_json(n, l, o, pa);
  write_file(fs::path(o.out) / "parallel.json", j.dump(2) + "\n");
  if (o.format == "json") {
    std::cout << j.dump(2) << '\n';
  } else if (o.format == "csv") {
    std::cout << "root,mean_random,pct95_random\n";
    char buf[32];
    for (size_t jj = 0; jj < pa.mean_eigenvalues.size(); ++jj) {
      std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f", jj + 1, pa.mean_eigenvalues[jj],
                    pa.pct95_eigenvalues[jj]);
      std::cout << buf << '\n';
    }
  } else {
    std::cout << "Parallel analysis: " << n << " x " << l << ", " << o.reps
              << " replications, seed " << effective_seed(o) << '\n';
    std::cout << "  ROOT  MEAN    95TH\n";
    for (size_t jj = 0; jj < pa.mean_eigenvalues.size(); ++jj)
      std::cout << "  " << jj + 1 << "     " << rascal::fmt::num2(pa.mean_eigenvalues[jj]) << "  "
                << rascal::fmt::num2(pa.pct95_eigenvalues[jj]) << '\n';
  }
  return 0;
}

int cmd_ctt(const Options& o) {
  auto r = rascal::ctt_summary(load_scored(o));
  write_file(fs::path(o.out) / "ctt.json", ctt_json(r).dump(2) + "\n");
  write_file(fs::path(o.out) / "ctt.txt", ctt_text(r));
  if (o.format == "json")
    std::cout << ctt_json(r).dump(2) << '\n';
  else
    std::cout << ctt_text(r);
  return 0;
}

int cmd_report(const Options& o) {
  Pipeline p = run_calibration(o);
  fs::path out(o.out);

  write_file(out / "calibration.json", calibration_json(o, p).dump(2) + "\n");

  auto res = rascal::standardized_residuals(p.trimmed, p.cal);
  auto rep = rascal::fit_statistics(res, p.cal);
  auto mrows = rascal::misfit_rows(p.trimmed, p.cal, rep);
  write_file(out / "fit.json", fit_json(p, rep).dump(2) + "\n");
  write_file(out / "residuals.csv", residuals_csv(p, res));
  write_file(out / "misfit_table.txt", rascal::render_misfit_table(mrows));

  auto crows = rascal::category_rows(p.trimmed, p.cal);
  write_file(out / "category_table.txt", rascal::render_category_table(crows));
  write_file(out / "category_curves.csv", rascal::emit_category_curves(p.cal));

  write_file(out / "wright_map.txt",
             rascal::render_wright_map(p.cal, o.bin_width, rascal::MapVariant::Simple));
  write_file(out / "wright_map_thresholds.txt",
             rascal::render_wright_map(p.cal, o.bin_width, rascal::MapVariant::Thresholds));

  rascal::Mat data = o.pca_on == "residuals" ? res.z : score_data(p.scored);
  auto r = rascal::pca(data, o.components);
  auto pa = rascal::parallel_analysis(data.rows, data.cols, o.reps, effective_seed(o));
  int retained = rascal::retained_components(r.eigenvalues, pa);
  write_file(out / "pca.json", pca_json(o, r, data.rows, pa, retained).dump(2) + "\n");
  write_file(out / "parallel.json", parallel_json(data.rows, data.cols, o, pa).dump(2) + "\n");
  write_file(out / "scree.csv", scree_csv(r.eigenvalues, pa));

  auto ctt = rascal::ctt_summary(p.scored);
  write_file(out / "ctt.json", ctt_json(ctt).dump(2) + "\n");
  write_file(out / "ctt.txt", ctt_text(ctt));

  std::cout << "Report written to " << o.out << '\n';
  return finish_calibrated(p);
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw rascal::DataError(std::string("bad ") + what + " entry: " + tok);
    }
  }
  if (out.empty()) throw rascal::DataError(std::string(what) + " list is empty");
  return out;
}

std::vector<std::string> parse_ids(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

int cmd_simulate(const Options& o, int n, const std::string& deltas, const std::string& tau,
                 double beta_mean, double beta_sd, int min_category, const std::string& items,
                 const std::string& reverse) {
  rascal::SimulateSpec spec;
  spec.n_persons = n;
  spec.deltas = parse_list(deltas, "delta");
  spec.tau = parse_list(tau, "tau");
  spec.beta_mean = beta_mean;
  spec.beta_sd = beta_sd;
  spec.seed = effective_seed(o);
  spec.min_category = min_category;
  if (!items.empty()) spec.item_ids = parse_ids(items);
  if (!reverse.empty()) spec.reverse_items = parse_ids(reverse);

  auto m = rascal::simulate_matrix(spec);
  write_file(fs::path(o.out) / "data.csv", rascal::response_csv(m));
  write_file(fs::path(o.out) / "keys.csv", rascal::keys_csv(m.keys));
  std::cout << "Wrote " << m.n_persons() << " x " << m.n_items() << " responses to " << o.out
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rascal: Rasch rating-scale calibration toolkit"};
  app.require_subcommand(1);

  Options o;

  auto add_common = [&](CLI::App* c, bool needs_data) {
    if (needs_data) {
      c->add_option("--input", o.input, "response CSV (person_id,<item>,...)");
      c->add_option("--keys", o.keys, "scoring key CSV (item_id,direction,min,max)");
    }
    c->add_option("--out", o.out, "output directory")->capture_default_str();
    c->add_option_function<uint64_t>(
        "--seed", [&o](const uint64_t& v) { o.seed = v; },
        "RNG seed (fallback: RASCAL_SEED, then 1)");
    c->add_option("--format", o.format, "stdout rendering")
        ->check(CLI::IsMember({"text", "json", "csv"}))
        ->capture_default_str();
    return c;
  };
  auto add_estimation = [&](CLI::App* c) {
    c->add_option("--tolerance", o.tolerance, "convergence tolerance, logits")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c->add_option("--max-iter", o.max_iter, "iteration cap")
        ->check(CLI::Range(1, 1000000))
        ->capture_default_str();
    c->add_option("--damping", o.damping, "Newton step clamp, logits")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c->add_flag("--bias-correction", o.bias_correction, "rescale item measures by (L-1)/L");
    return c;
  };

  auto* calibrate = add_estimation(add_common(app.add_subcommand("calibrate", "estimate measures"),
                                              true));
  auto* fitc = add_estimation(add_common(app.add_subcommand("fit", "residual fit tables"), true));
  auto* category = add_estimation(
      add_common(app.add_subcommand("category", "category structure and curves"), true));
  auto* mapc =
      add_estimation(add_common(app.add_subcommand("map", "Wright variable maps"), true));
  mapc->add_option("--bin-width", o.bin_width, "map bin width, logits")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* pcac = add_estimation(
      add_common(app.add_subcommand("pca", "principal components with parallel envelope"), true));
  pcac->add_option("--pca-on", o.pca_on, "analyze residuals or scores")
      ->check(CLI::IsMember({"residuals", "scores"}))
      ->capture_default_str();
  pcac->add_option("--components", o.components, "components to rotate")
      ->check(CLI::Range(1, 1000))
      ->capture_default_str();
  pcac->add_option("--reps", o.reps, "parallel-analysis replications")
      ->check(CLI::Range(1, 1000000))
      ->capture_default_str();

  int par_n = 0, par_l = 0;
  auto* parallel = add_common(app.add_subcommand("parallel", "random-data eigenvalue envelope"),
                              false);
  parallel->add_option("--n", par_n, "persons")->required()->check(CLI::Range(2, 100000000));
  parallel->add_option("--l", par_l, "items")->required()->check(CLI::Range(1, 100000));
  parallel->add_option("--reps", o.reps, "replications")
      ->check(CLI::Range(1, 1000000))
      ->capture_default_str();

  auto* cttc = add_common(app.add_subcommand("ctt", "classical reliability summary"), true);

  auto* reportc =
      add_estimation(add_common(app.add_subcommand("report", "full report bundle"), true));
  reportc->add_option("--pca-on", o.pca_on, "analyze residuals or scores")
      ->check(CLI::IsMember({"residuals", "scores"}))
      ->capture_default_str();
  reportc->add_option("--components", o.components, "components to rotate")
      ->check(CLI::Range(1, 1000))
      ->capture_default_str();
  reportc->add_option("--reps", o.reps, "parallel-analysis replications")
      ->check(CLI::Range(1, 1000000))
      ->capture_default_str();
  reportc->add_option("--bin-width", o.bin_width, "map bin width, logits")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  int sim_n = 0;
  std::string sim_deltas, sim_tau, sim_items, sim_reverse;
  double sim_beta_mean = 0.0, sim_beta_sd = 1.0;
  int sim_min = 1;
  auto* simulate = add_common(app.add_subcommand("simulate", "generate rating-scale data"), false);
  simulate->add_option("--n", sim_n, "persons")->required()->check(CLI::Range(1, 100000000));
  simulate->add_option("--delta", sim_deltas, "item difficulties, comma separated")->required();
  simulate->add_option("--tau", sim_tau, "thresholds, comma separated")->required();
  simulate->add_option("--beta-mean", sim_beta_mean, "ability mean")->capture_default_str();
  simulate->add_option("--beta-sd", sim_beta_sd, "ability SD")->capture_default_str();
  simulate->add_option("--min-category", sim_min, "external code floor")->capture_default_str();
  simulate->add_option("--items", sim_items, "item ids, comma separated");
  simulate->add_option("--reverse", sim_reverse, "reverse-keyed item ids, comma separated");

  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(o.out);
    if (app.got_subcommand(calibrate)) return cmd_calibrate(o);
    if (app.got_subcommand(fitc)) return cmd_fit(o);
    if (app.got_subcommand(category)) return cmd_category(o);
    if (app.got_subcommand(mapc)) return cmd_map(o);
    if (app.got_subcommand(pcac)) return cmd_pca(o);
    if (app.got_subcommand(parallel)) return cmd_parallel(o, par_n, par_l);
    if (app.got_subcommand(cttc)) return cmd_ctt(o);
    if (app.got_subcommand(reportc)) return cmd_report(o);
    if (app.got_subcommand(simulate))
      return cmd_simulate(o, sim_n, sim_deltas, sim_tau, sim_beta_mean, sim_beta_sd, sim_min,
                          sim_items, sim_reverse);
  } catch (const rascal::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
