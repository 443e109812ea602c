#include "rascal/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "rascal/mathutil.hpp"
#include "rascal/model.hpp"

namespace rascal {

namespace fmt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fixed(double x, int decimals) {
  if (std::isnan(x)) return "";
  double p = std::pow(10.0, decimals);
  double r = std::round(x * p) / p;  // half away from zero
  if (r == 0.0) r = 0.0;             // no negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, r);
  return buf;
}

}  // namespace

std::string num2(double x) { return fixed(x, 2); }

std::string zstd1(double x) {
  if (std::isnan(x)) return "";
  double p = 10.0;
  double r = std::round(x * p) / p;
  r = std::clamp(r, -9.9, 9.9);
  if (r == 0.0) r = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", r);
  return buf;
}

std::string pct0(double x) { return fixed(x, 0); }

std::string pct1(double x) { return fixed(x, 1); }

}  // namespace fmt

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string pad_left(const std::string& s, int w) {
  return s.size() >= static_cast<size_t>(w) ? s : std::string(w - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, int w) {
  return s.size() >= static_cast<size_t>(w) ? s : s + std::string(w - s.size(), ' ');
}

int shared_min_category(const ResponseMatrix& m) {
  int lo = m.keys.front().min_category;
  for (const auto& k : m.keys)
    if (k.min_category != lo) return 0;  // mixed floors: report internal codes
  return lo;
}

}  // namespace

std::vector<CategoryRow> category_rows(const ResponseMatrix& m, const Calibration& cal) {
  if (!m.scored) throw DataError("category_rows requires a scored matrix");
  const int n = m.n_persons(), l = m.n_items();
  if (static_cast<int>(cal.persons.size()) != n || static_cast<int>(cal.items.size()) != l)
    throw DataError("calibration does not match the matrix dimensions");

  const auto& tau = cal.structure.tau;
  const int mm = static_cast<int>(tau.size());
  auto cum = detail::cumulative_tau(tau);

  std::vector<long> count(mm + 1, 0);
  std::vector<double> sum_bd(mm + 1, 0.0), sq_raw(mm + 1, 0.0), sq_z(mm + 1, 0.0),
      sum_v(mm + 1, 0.0), exp_num(mm + 1, 0.0), exp_den(mm + 1, 0.0);
  std::vector<double> probs(static_cast<size_t>(mm) + 1);

  for (int v = 0; v < n; ++v)
    for (int i = 0; i < l; ++i) {
      int x = m.at(v, i);
      if (x == kMissing) continue;
      double bd = cal.persons[v].measure - cal.items[i].measure;
      auto mo = detail::rsm_moments(bd, cum);
      detail::rsm_probs_into(bd, cum, probs.data());
      ++count[x];
      sum_bd[x] += bd;
      double raw = x - mo.e;
      sq_raw[x] += raw * raw;
      sq_z[x] += raw * raw / mo.v;
      sum_v[x] += mo.v;
      for (int k = 0; k <= mm; ++k) {
        exp_num[k] += probs[k] * bd;
        exp_den[k] += probs[k];
      }
    }

  long total = 0;
  for (long c : count) total += c;

  const int base = shared_min_category(m);
  std::vector<CategoryRow> rows(mm + 1);
  for (int k = 0; k <= mm; ++k) {
    auto& r = rows[k];
    r.label = base + k;
    r.count = count[k];
    r.sample_pct = total > 0 ? 100.0 * count[k] / total : kNaN;
    r.obs_avg = count[k] > 0 ? sum_bd[k] / count[k] : kNaN;
    r.exp_avg = exp_den[k] > 0.0 ? exp_num[k] / exp_den[k] : kNaN;
    r.outfit = count[k] > 0 ? sq_z[k] / count[k] : kNaN;
    r.infit = sum_v[k] > 0.0 ? sq_raw[k] / sum_v[k] : kNaN;
    r.has_andrich = k >= 1;
    if (k >= 1) {
      r.andrich = tau[k - 1];
      r.andrich_se = cal.structure.tau_se[k - 1];
      r.has_cum50 = !cal.structure.thurstone.empty();
      if (r.has_cum50) r.cum50 = cal.structure.thurstone[k - 1];
    }
    r.cat_measure = cal.structure.category_measures[k];
    r.extreme = k == 0 || k == mm;
    r.zone_lo = k == 0 ? -std::numeric_limits<double>::infinity()
                       : score_to_measure(k - 0.5, 0.0, tau);
    r.zone_hi = k == mm ? std::numeric_limits<double>::infinity()
                        : score_to_measure(k + 0.5, 0.0, tau);
    if (k > 0 && count[k] > 0 && count[k - 1] > 0 && rows[k - 1].obs_avg > r.obs_avg)
      r.disordered = true;
  }
  return rows;
}

std::string render_category_table(const std::vector<CategoryRow>& rows) {
  std::ostringstream os;
  const char* rule =
      "-------------------------------------------------------------------------------\n";
  os << "SUMMARY OF CATEGORY STRUCTURE\n" << rule;
  os << " CATEGORY  OBSERVED  SAMPLE    OBSVD   SAMPLE   INFIT  OUTFIT  ANDRICH  CATEGORY\n";
  os << "    LABEL     COUNT       %    AVRGE   EXPECT    MNSQ    MNSQ  THRSHLD   MEASURE\n";
  os << rule;
  for (const auto& r : rows) {
    std::string avg = fmt::num2(r.obs_avg) + (r.disordered ? "*" : "");
    std::string meas = r.extreme ? "(" + fmt::num2(r.cat_measure) + ")" : fmt::num2(r.cat_measure);
    os << pad_left(std::to_string(r.label), 9) << pad_left(std::to_string(r.count), 10)
       << pad_left(fmt::pct0(r.sample_pct), 8) << pad_left(avg, 9)
       << pad_left(fmt::num2(r.exp_avg), 9) << pad_left(fmt::num2(r.infit), 8)
       << pad_left(fmt::num2(r.outfit), 8)
       << pad_left(r.has_andrich ? fmt::num2(r.andrich) : "NONE", 9) << pad_left(meas, 10)
       << '\n';
  }
  os << rule << '\n';
  os << " CATEGORY  STRUCTURE    S.E.  CATEGORY        ZONE        50% CUMUL.\n";
  os << "    LABEL    MEASURE           MEASURE    FROM      TO    PROBABILITY\n";
  os << rule;
  for (const auto& r : rows) {
    std::string meas = r.extreme ? "(" + fmt::num2(r.cat_measure) + ")" : fmt::num2(r.cat_measure);
    std::string lo = std::isinf(r.zone_lo) ? "-INF" : fmt::num2(r.zone_lo);
    std::string hi = std::isinf(r.zone_hi) ? "+INF" : fmt::num2(r.zone_hi);
    os << pad_left(std::to_string(r.label), 9)
       << pad_left(r.has_andrich ? fmt::num2(r.andrich) : "NONE", 11)
       << pad_left(r.has_andrich ? fmt::num2(r.andrich_se) : "", 8) << pad_left(meas, 10)
       << pad_left(lo, 8) << pad_left(hi, 8)
       << pad_left(r.has_cum50 ? fmt::num2(r.cum50) : "", 13) << '\n';
  }
  os << rule;
  return os.str();
}

std::vector<MisfitRow> misfit_rows(const ResponseMatrix& m, const Calibration& cal,
                                   const FitReport& fit) {
  if (!m.scored) throw DataError("misfit_rows requires a scored matrix");
  const int n = m.n_persons(), l = m.n_items();
  if (static_cast<int>(cal.items.size()) != l || static_cast<int>(fit.items.size()) != l)
    throw DataError("calibration or fit does not match the matrix dimensions");

  auto cum = detail::cumulative_tau(cal.structure.tau);
  const int mm = static_cast<int>(cal.structure.tau.size());
  std::vector<double> probs(static_cast<size_t>(mm) + 1);

  std::vector<MisfitRow> rows(l);
  for (int i = 0; i < l; ++i) {
    auto& r = rows[i];
    r.entry = i + 1;
    r.id = m.item_ids[i];
    r.count = m.item_count(i);
    r.total = static_cast<double>(m.item_raw_score(i)) +
              static_cast<double>(r.count) * m.keys[i].min_category;
    r.measure = cal.items[i].measure;
    r.se = cal.items[i].se;
    r.fit = fit.items[i];

    std::vector<double> xs, bs;
    double sum_e = 0.0;
    long match = 0;
    double exp_match = 0.0;
    for (int v = 0; v < n; ++v) {
      if (m.is_missing(v, i)) continue;
      xs.push_back(static_cast<double>(m.at(v, i)));
      bs.push_back(cal.persons[v].measure);
      double bd = cal.persons[v].measure - cal.items[i].measure;
      auto mo = detail::rsm_moments(bd, cum);
      sum_e += mo.e;
      if (m.at(v, i) == std::lround(mo.e)) ++match;
      detail::rsm_probs_into(bd, cum, probs.data());
      exp_match += *std::max_element(probs.begin(), probs.end());
    }
    const double cnt = static_cast<double>(xs.size());
    r.exact_obs_pct = 100.0 * match / cnt;
    r.exact_exp_pct = 100.0 * exp_match / cnt;

    try {
      r.ptmeas_obs = pearson(xs, bs);
    } catch (const std::domain_error&) {
      r.ptmeas_obs = kNaN;
    }
    // expected correlation: model covariance over the same persons, with the
    // response variance added to the expected-score spread
    double eb = mean(bs), ee = sum_e / cnt;
    double cov = 0.0, var_e = 0.0, var_b = 0.0, sum_v = 0.0;
    for (size_t j = 0; j < bs.size(); ++j) {
      double bd = bs[j] - cal.items[i].measure;
      auto mo = detail::rsm_moments(bd, cum);
      cov += (mo.e - ee) * (bs[j] - eb);
      var_e += (mo.e - ee) * (mo.e - ee);
      var_b += (bs[j] - eb) * (bs[j] - eb);
      sum_v += mo.v;
    }
    double den = std::sqrt((var_e + sum_v) * var_b);
    r.ptmeas_exp = den > 0.0 ? cov / den : kNaN;
  }

  std::stable_sort(rows.begin(), rows.end(), [](const MisfitRow& a, const MisfitRow& b) {
    auto key = [](const MisfitRow& r) {
      return std::max(std::abs(r.fit.infit_mnsq - 1.0), std::abs(r.fit.outfit_mnsq - 1.0));
    };
    return key(a) > key(b);
  });
  return rows;
}

std::string render_misfit_table(const std::vector<MisfitRow>& rows) {
  std::ostringstream os;
  const char* rule =
      "----------------------------------------------------------------------------------------------------\n";
  os << "ITEM STATISTICS: MISFIT ORDER\n" << rule;
  os << " ENTRY     TOTAL  TOTAL             MODEL    INFIT         OUTFIT        PTMEAS          EXACT MATCH\n";
  os << "NUMBER     SCORE  COUNT   MEASURE    S.E.    MNSQ   ZSTD    MNSQ   ZSTD   CORR.   EXP.    OBS%   EXP%  ITEM\n";
  os << rule;
  for (const auto& r : rows) {
    os << pad_left(std::to_string(r.entry), 6) << pad_left(fmt::pct0(r.total), 10)
       << pad_left(std::to_string(r.count), 7) << pad_left(fmt::num2(r.measure), 10)
       << pad_left(fmt::num2(r.se), 8) << pad_left(fmt::num2(r.fit.infit_mnsq), 8)
       << pad_left(fmt::zstd1(r.fit.infit_zstd), 7) << pad_left(fmt::num2(r.fit.outfit_mnsq), 8)
       << pad_left(fmt::zstd1(r.fit.outfit_zstd), 7) << pad_left(fmt::num2(r.ptmeas_obs), 7)
       << pad_left(fmt::num2(r.ptmeas_exp), 7) << pad_left(fmt::pct1(r.exact_obs_pct), 8)
       << pad_left(fmt::pct1(r.exact_exp_pct), 7) << "  " << r.id << '\n';
  }
  os << rule;
  return os.str();
}

namespace {

struct Markers {
  long m_bin = 0, s_lo = 0, s_hi = 0, t_lo = 0, t_hi = 0;
  bool spread = false;

  static Markers from(const std::vector<double>& x, double bw) {
    Markers mk;
    double mu = mean(x);
    double sd = std::sqrt(variance_pop(x));
    mk.m_bin = std::lround(mu / bw);
    mk.spread = sd > 0.0;
    mk.s_lo = std::lround((mu - sd) / bw);
    mk.s_hi = std::lround((mu + sd) / bw);
    mk.t_lo = std::lround((mu - 2 * sd) / bw);
    mk.t_hi = std::lround((mu + 2 * sd) / bw);
    return mk;
  }

  char at(long bin) const {
    if (bin == m_bin) return 'M';
    if (spread && (bin == s_lo || bin == s_hi)) return 'S';
    if (spread && (bin == t_lo || bin == t_hi)) return 'T';
    return ' ';
  }

  long lowest() const { return spread ? t_lo : m_bin; }
  long highest() const { return spread ? t_hi : m_bin; }
};

std::string join_ids(const std::vector<std::string>& ids) {
  std::string s;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i) s += "; ";
    s += ids[i];
  }
  return s;
}

}  // namespace

std::string render_wright_map(const Calibration& cal, double bin_width, MapVariant variant) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("bin_width must be positive");
  if (cal.persons.empty() || cal.items.empty())
    throw DataError("render_wright_map needs calibrated persons and items");
  const double bw = bin_width;

  std::map<long, int> person_bins;
  std::vector<double> pm, im;
  for (const auto& p : cal.persons) {
    ++person_bins[std::lround(p.measure / bw)];
    pm.push_back(p.measure);
  }
  for (const auto& it : cal.items) im.push_back(it.measure);

  Markers pmark = Markers::from(pm, bw);
  Markers imark = Markers::from(im, bw);

  // item label columns: one for the simple map, bottom/center/top otherwise
  const int ncols = variant == MapVariant::Simple ? 1 : 3;
  std::vector<std::map<long, std::vector<std::string>>> cols(ncols);
  double thr_lo = 0.0, thr_hi = 0.0;
  if (variant == MapVariant::Thresholds) {
    thr_lo = cal.structure.thurstone.front();
    thr_hi = cal.structure.thurstone.back();
  }
  for (const auto& it : cal.items) {
    if (variant == MapVariant::Simple) {
      cols[0][std::lround(it.measure / bw)].push_back(it.id);
    } else {
      cols[0][std::lround((it.measure + thr_lo) / bw)].push_back(it.id);
      cols[1][std::lround(it.measure / bw)].push_back(it.id);
      cols[2][std::lround((it.measure + thr_hi) / bw)].push_back(it.id);
    }
  }

  long hi = person_bins.rbegin()->first, lo = person_bins.begin()->first;
  for (const auto& c : cols) {
    if (c.empty()) continue;
    hi = std::max(hi, c.rbegin()->first);
    lo = std::min(lo, c.begin()->first);
  }
  hi = std::max({hi, pmark.highest(), imark.highest()});
  lo = std::min({lo, pmark.lowest(), imark.lowest()});

  // stretch to the integer-logit rows just beyond the content, when the bin
  // width lands on them
  double per_logit = 1.0 / bw;
  bool labeled_rows = std::abs(per_logit - std::round(per_logit)) < 1e-9;
  if (labeled_rows) {
    long per = std::lround(per_logit);
    while (hi % per != 0) ++hi;
    while (lo % per != 0) --lo;
  }

  int peak = 0;
  for (const auto& [bin, c] : person_bins) peak = std::max(peak, c);
  int scale = std::max(1, static_cast<int>(std::ceil(peak / 40.0)));

  auto glyphs = [&](long bin) {
    auto it = person_bins.find(bin);
    if (it == person_bins.end()) return std::string();
    std::string g(it->second / scale, '#');
    if (it->second % scale) g += '.';
    return g;
  };

  int pw = 4;
  for (const auto& [bin, c] : person_bins)
    pw = std::max(pw, static_cast<int>(glyphs(bin).size()));
  std::vector<int> cw(ncols, 1);
  for (int c = 0; c < ncols; ++c)
    for (const auto& [bin, ids] : cols[c])
      cw[c] = std::max(cw[c], static_cast<int>(join_ids(ids).size()));

  std::ostringstream os;
  os << "MEASURE  PERSON - MAP - ITEM\n";
  if (variant == MapVariant::Thresholds)
    os << "         (items at bottom 50% threshold | difficulty | top 50% threshold)\n";
  os << std::string(pw + 3, ' ') << "<more>|<rare>\n";

  auto ids_at = [&](int c, long row) {
    auto it = cols[c].find(row);
    return it == cols[c].end() ? std::string() : join_ids(it->second);
  };
  for (long row = hi; row >= lo; --row) {
    double meas = row * bw;
    bool at_int = std::abs(meas - std::round(meas)) < 1e-9;
    std::string label = at_int ? std::to_string(static_cast<long>(std::llround(meas))) : "";
    char sep = at_int ? '+' : '|';
    std::string line = pad_left(label, 5) + "  " + pad_left(glyphs(row), pw) + ' ' +
                       pmark.at(row) + sep + imark.at(row) + ' ';
    if (variant == MapVariant::Simple) {
      line += ids_at(0, row);
    } else {
      line += pad_right(ids_at(0, row), cw[0]) + " | " + pad_right(ids_at(1, row), cw[1]) +
              " | " + ids_at(2, row);
    }
    size_t end = line.find_last_not_of(' ');
    os << line.substr(0, end + 1) << '\n';
  }

  os << std::string(pw + 3, ' ') << "<less>|<freq>\n";
  if (scale > 1)
    os << "EACH \"#\" IS " << scale << ": EACH \".\" IS 1 TO " << scale - 1 << '\n';
  else
    os << "EACH \"#\" IS 1\n";
  return os.str();
}

std::string emit_category_curves(const Calibration& cal, double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi > lo)) throw std::invalid_argument("bad curve grid");
  const auto& tau = cal.structure.tau;
  const int mm = static_cast<int>(tau.size());

  std::ostringstream os;
  os << "beta_minus_delta";
  for (int k = 0; k <= mm; ++k) os << ",pi_" << k;
  os << '\n';
  char buf[32];
  int steps = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
  for (int j = 0; j <= steps; ++j) {
    double x = lo + j * step;
    auto p = rsm_category_probs(x, 0.0, tau);
    std::snprintf(buf, sizeof buf, "%.2f", x);
    os << buf;
    for (double pk : p) {
      std::snprintf(buf, sizeof buf, "%.6f", pk);
      os << ',' << buf;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace rascal
