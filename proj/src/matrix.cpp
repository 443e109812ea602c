#include "rascal/matrix.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace rascal {

namespace {

std::string trim_ws(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim_ws(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

int ResponseMatrix::shared_max_score() const {
  if (keys.empty()) throw DataError("no scoring keys attached");
  int m = keys[0].max_score();
  for (const auto& k : keys)
    if (k.max_score() != m)
      throw DataError("item " + k.item_id + " has a different category range than the rest");
  return m;
}

long ResponseMatrix::person_raw_score(int v) const {
  long s = 0;
  for (int i = 0; i < n_items(); ++i)
    if (!is_missing(v, i)) s += at(v, i);
  return s;
}

int ResponseMatrix::person_count(int v) const {
  int c = 0;
  for (int i = 0; i < n_items(); ++i)
    if (!is_missing(v, i)) ++c;
  return c;
}

long ResponseMatrix::person_max_score(int v) const {
  long s = 0;
  for (int i = 0; i < n_items(); ++i)
    if (!is_missing(v, i)) s += keys[i].max_score();
  return s;
}

long ResponseMatrix::item_raw_score(int i) const {
  long s = 0;
  for (int v = 0; v < n_persons(); ++v)
    if (!is_missing(v, i)) s += at(v, i);
  return s;
}

int ResponseMatrix::item_count(int i) const {
  int c = 0;
  for (int v = 0; v < n_persons(); ++v)
    if (!is_missing(v, i)) ++c;
  return c;
}

long ResponseMatrix::item_max_score(int i) const {
  return static_cast<long>(item_count(i)) * keys[i].max_score();
}

ResponseMatrix load_response_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open response file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  auto header = split_csv_line(line);
  if (header.size() < 2) throw DataError(path + ": header needs person_id plus at least one item");

  ResponseMatrix m;
  m.item_ids.assign(header.begin() + 1, header.end());
  for (size_t i = 0; i < m.item_ids.size(); ++i)
    if (m.item_ids[i].empty())
      throw DataError(path + ": empty item id in header column " + std::to_string(i + 2));

  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim_ws(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw DataError(path + ": row " + std::to_string(row) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()));
    if (fields[0].empty())
      throw DataError(path + ": row " + std::to_string(row) + " has an empty person_id");
    m.person_ids.push_back(fields[0]);
    for (size_t i = 1; i < fields.size(); ++i) {
      const std::string& f = fields[i];
      if (f.empty() || f == "NA") {
        m.cells.push_back(kMissing);
        continue;
      }
      try {
        size_t pos = 0;
        int code = std::stoi(f, &pos);
        if (pos != f.size()) throw std::invalid_argument(f);
        m.cells.push_back(code);
      } catch (const std::exception&) {
        throw DataError(path + ": row " + std::to_string(row) + ", column " + header[i] +
                        ": cannot parse \"" + f + "\" as a category code");
      }
    }
  }
  if (m.person_ids.empty()) throw DataError(path + ": no person rows");
  return m;
}

std::vector<ScoringKey> load_keys_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open key file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  std::vector<ScoringKey> keys;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim_ws(line).empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 4)
      throw DataError(path + ": row " + std::to_string(row) + " needs item_id,direction,min,max");
    ScoringKey k;
    k.item_id = f[0];
    if (f[1] == "F")
      k.direction = Direction::Forward;
    else if (f[1] == "R")
      k.direction = Direction::Reverse;
    else
      throw DataError(path + ": row " + std::to_string(row) + ": direction must be F or R, got \"" +
                      f[1] + "\"");
    try {
      k.min_category = std::stoi(f[2]);
      k.max_category = std::stoi(f[3]);
    } catch (const std::exception&) {
      throw DataError(path + ": row " + std::to_string(row) + ": min/max must be integers");
    }
    if (k.max_category <= k.min_category)
      throw DataError(path + ": item " + k.item_id + ": max_category must exceed min_category");
    keys.push_back(k);
  }
  if (keys.empty()) throw DataError(path + ": no key rows");
  return keys;
}

void attach_keys(ResponseMatrix& m, const std::vector<ScoringKey>& keys) {
  std::unordered_map<std::string, const ScoringKey*> by_id;
  for (const auto& k : keys) by_id[k.item_id] = &k;
  m.keys.clear();
  for (const auto& id : m.item_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw DataError("no scoring key for item " + id);
    m.keys.push_back(*it->second);
  }
  m.shared_max_score();
}

ResponseMatrix apply_scoring(const ResponseMatrix& raw) {
  if (raw.scored) throw DataError("matrix is already scored");
  if (raw.keys.size() != raw.item_ids.size()) throw DataError("scoring keys not attached");

  ResponseMatrix out = raw;
  out.scored = true;
  for (int v = 0; v < raw.n_persons(); ++v) {
    for (int i = 0; i < raw.n_items(); ++i) {
      int code = raw.at(v, i);
      if (code == kMissing) continue;
      const ScoringKey& k = raw.keys[i];
      if (code < k.min_category || code > k.max_category)
        throw DataError("person " + raw.person_ids[v] + ", item " + raw.item_ids[i] + ": code " +
                        std::to_string(code) + " outside [" + std::to_string(k.min_category) +
                        "," + std::to_string(k.max_category) + "]");
      out.at(v, i) =
          k.direction == Direction::Forward ? code - k.min_category : k.max_category - code;
    }
  }
  return out;
}

std::pair<ResponseMatrix, TrimLog> trim_extremes(const ResponseMatrix& scored) {
  if (!scored.scored) throw DataError("trim_extremes requires a scored matrix");
  const int n = scored.n_persons(), l = scored.n_items();

  std::vector<bool> keep_p(n, true), keep_i(l, true);
  TrimLog log;

  for (;;) {
    std::vector<int> drop_p, drop_i;
    std::vector<TrimReason> why_p, why_i;

    for (int v = 0; v < n; ++v) {
      if (!keep_p[v]) continue;
      long raw = 0, maxraw = 0;
      for (int i = 0; i < l; ++i) {
        if (!keep_i[i] || scored.is_missing(v, i)) continue;
        raw += scored.at(v, i);
        maxraw += scored.keys[i].max_score();
      }
      if (raw == 0) {
        drop_p.push_back(v);
        why_p.push_back(TrimReason::Zero);
      } else if (raw == maxraw) {
        drop_p.push_back(v);
        why_p.push_back(TrimReason::Perfect);
      }
    }
    for (int i = 0; i < l; ++i) {
      if (!keep_i[i]) continue;
      long raw = 0, maxraw = 0;
      for (int v = 0; v < n; ++v) {
        if (!keep_p[v] || scored.is_missing(v, i)) continue;
        raw += scored.at(v, i);
        maxraw += scored.keys[i].max_score();
      }
      if (raw == 0) {
        drop_i.push_back(i);
        why_i.push_back(TrimReason::Zero);
      } else if (raw == maxraw) {
        drop_i.push_back(i);
        why_i.push_back(TrimReason::Perfect);
      }
    }

    if (drop_p.empty() && drop_i.empty()) break;
    ++log.passes;
    for (size_t k = 0; k < drop_p.size(); ++k) {
      keep_p[drop_p[k]] = false;
      log.removed_persons.emplace_back(scored.person_ids[drop_p[k]], why_p[k]);
    }
    for (size_t k = 0; k < drop_i.size(); ++k) {
      keep_i[drop_i[k]] = false;
      log.removed_items.emplace_back(scored.item_ids[drop_i[k]], why_i[k]);
    }
    bool any_p = std::any_of(keep_p.begin(), keep_p.end(), [](bool b) { return b; });
    bool any_i = std::any_of(keep_i.begin(), keep_i.end(), [](bool b) { return b; });
    if (!any_p) throw DataError("degenerate matrix: all persons removed as extreme");
    if (!any_i) throw DataError("degenerate matrix: all items removed as extreme");
  }

  ResponseMatrix out;
  out.scored = true;
  for (int i = 0; i < l; ++i) {
    if (!keep_i[i]) continue;
    out.item_ids.push_back(scored.item_ids[i]);
    out.keys.push_back(scored.keys[i]);
  }
  for (int v = 0; v < n; ++v) {
    if (!keep_p[v]) continue;
    out.person_ids.push_back(scored.person_ids[v]);
    for (int i = 0; i < l; ++i)
      if (keep_i[i]) out.cells.push_back(scored.at(v, i));
  }
  return {out, log};
}

const char* to_string(TrimReason r) { return r == TrimReason::Zero ? "zero" : "perfect"; }

}  // namespace rascal
