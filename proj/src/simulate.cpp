#include "rascal/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rascal/mathutil.hpp"
#include "rascal/model.hpp"

namespace rascal {

ResponseMatrix simulate_matrix(const SimulateSpec& spec, std::vector<double>* true_beta) {
  if (spec.n_persons < 1) throw std::invalid_argument("n_persons must be at least 1");
  if (spec.deltas.empty()) throw std::invalid_argument("deltas must be non-empty");
  if (spec.tau.empty()) throw std::invalid_argument("tau must be non-empty");
  if (!(spec.beta_sd >= 0.0)) throw std::invalid_argument("beta_sd must be non-negative");

  const int n = spec.n_persons;
  const int l = static_cast<int>(spec.deltas.size());
  const int m = static_cast<int>(spec.tau.size());

  ResponseMatrix out;
  out.person_ids.resize(n);
  int width = static_cast<int>(std::to_string(n).size());
  for (int v = 0; v < n; ++v) {
    std::string num = std::to_string(v + 1);
    out.person_ids[v] = "P" + std::string(width - num.size(), '0') + num;
  }

  if (!spec.item_ids.empty()) {
    if (static_cast<int>(spec.item_ids.size()) != l)
      throw std::invalid_argument("item_ids must match deltas in length");
    out.item_ids = spec.item_ids;
  } else {
    out.item_ids.resize(l);
    for (int i = 0; i < l; ++i) out.item_ids[i] = "Q" + std::to_string(i + 1);
  }

  std::vector<bool> reversed(l, false);
  for (const auto& id : spec.reverse_items) {
    auto it = std::find(out.item_ids.begin(), out.item_ids.end(), id);
    if (it == out.item_ids.end())
      throw std::invalid_argument("reverse item " + id + " is not among the item ids");
    reversed[it - out.item_ids.begin()] = true;
  }

  out.keys.resize(l);
  for (int i = 0; i < l; ++i) {
    out.keys[i].item_id = out.item_ids[i];
    out.keys[i].direction = reversed[i] ? Direction::Reverse : Direction::Forward;
    out.keys[i].min_category = spec.min_category;
    out.keys[i].max_category = spec.min_category + m;
  }

  SplitMix64 rng(spec.seed);
  std::vector<double> beta(n);
  for (int v = 0; v < n; ++v) beta[v] = spec.beta_mean + spec.beta_sd * rng.normal();
  if (true_beta) *true_beta = beta;

  out.cells.assign(static_cast<size_t>(n) * l, kMissing);
  for (int v = 0; v < n; ++v)
    for (int i = 0; i < l; ++i) {
      auto probs = rsm_category_probs(beta[v], spec.deltas[i], spec.tau);
      double u = rng.uniform();
      int x = m;  // fallback absorbs the last sliver of rounding
      double cumul = 0.0;
      for (int k = 0; k <= m; ++k) {
        cumul += probs[k];
        if (u <= cumul) {
          x = k;
          break;
        }
      }
      int code = reversed[i] ? out.keys[i].max_category - x : spec.min_category + x;
      out.cells[static_cast<size_t>(v) * l + i] = code;
    }
  out.scored = false;
  return out;
}

std::string response_csv(const ResponseMatrix& m) {
  std::ostringstream os;
  os << "person_id";
  for (const auto& id : m.item_ids) os << ',' << id;
  os << '\n';
  for (int v = 0; v < m.n_persons(); ++v) {
    os << m.person_ids[v];
    for (int i = 0; i < m.n_items(); ++i) {
      os << ',';
      int c = m.cells[static_cast<size_t>(v) * m.n_items() + i];
      if (c != kMissing) os << c;
    }
    os << '\n';
  }
  return os.str();
}

std::string keys_csv(const std::vector<ScoringKey>& keys) {
  std::ostringstream os;
  os << "item_id,direction,min,max\n";
  for (const auto& k : keys)
    os << k.item_id << ',' << (k.direction == Direction::Reverse ? 'R' : 'F') << ','
       << k.min_category << ',' << k.max_category << '\n';
  return os.str();
}

}  // namespace rascal
