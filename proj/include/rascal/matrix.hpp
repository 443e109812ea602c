// Response-matrix representation, scoring-key application (including
// reverse-keyed items), and extreme person/item trimming.
#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rascal {

// Input-data problems (malformed CSV, bad codes, degenerate matrices).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Direction { Forward, Reverse };

struct ScoringKey {
  std::string item_id;
  Direction direction = Direction::Forward;
  int min_category = 0;
  int max_category = 1;

  // m: top internal score (categories 0..m)
  int max_score() const { return max_category - min_category; }
};

constexpr int kMissing = -1;

// Persons x items category codes. Holds external codes as loaded; after
// apply_scoring the cells are internal 0..m scores and `scored` is set.
// Immutable by convention once built.
struct ResponseMatrix {
  std::vector<std::string> person_ids;
  std::vector<std::string> item_ids;
  std::vector<ScoringKey> keys;  // parallel to item_ids
  std::vector<int> cells;        // row-major, kMissing for not-administered
  bool scored = false;

  int n_persons() const { return static_cast<int>(person_ids.size()); }
  int n_items() const { return static_cast<int>(item_ids.size()); }

  int at(int v, int i) const { return cells[static_cast<size_t>(v) * n_items() + i]; }
  int& at(int v, int i) { return cells[static_cast<size_t>(v) * n_items() + i]; }
  bool is_missing(int v, int i) const { return at(v, i) == kMissing; }

  // Shared m across items (an RSM analysis requires it; checked on attach).
  int shared_max_score() const;

  // Sufficient statistics over administered cells (scored matrices).
  long person_raw_score(int v) const;
  int person_count(int v) const;
  long person_max_score(int v) const;
  long item_raw_score(int i) const;
  int item_count(int i) const;
  long item_max_score(int i) const;

  // External (reported) score: internal + min_category.
  double external_score(int v, int i) const { return at(v, i) + keys[i].min_category; }
};

// CSV loaders. Response format: header `person_id,<item_id>,...`, one row per
// person, blank or NA cell = missing. Key format: `item_id,direction,min,max`
// with direction F or R.
ResponseMatrix load_response_csv(const std::string& path);
std::vector<ScoringKey> load_keys_csv(const std::string& path);

// Match keys to the matrix columns; every item needs one, all sharing one m.
void attach_keys(ResponseMatrix& m, const std::vector<ScoringKey>& keys);

// Map external codes to internal 0..m (reverse items invert the order).
// Rejects out-of-range codes naming person, item, and code.
ResponseMatrix apply_scoring(const ResponseMatrix& raw);

enum class TrimReason { Zero, Perfect };

struct TrimLog {
  std::vector<std::pair<std::string, TrimReason>> removed_persons;
  std::vector<std::pair<std::string, TrimReason>> removed_items;
  int passes = 0;
};

// Remove zero/perfect persons and items, iterated to a fixpoint (a removal
// can create new extremes). Throws DataError if nothing survives.
std::pair<ResponseMatrix, TrimLog> trim_extremes(const ResponseMatrix& scored);

const char* to_string(TrimReason r);

}  // namespace rascal
