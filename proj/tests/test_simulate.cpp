#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "rascal/mathutil.hpp"
#include "rascal/matrix.hpp"
#include "rascal/model.hpp"
#include "rascal/simulate.hpp"

using namespace rascal;

namespace {

SimulateSpec base_spec() {
  SimulateSpec sp;
  sp.n_persons = 200;
  sp.deltas = {-0.5, 0.0, 0.5};
  sp.tau = {-0.3, 0.0, 0.3};
  sp.seed = 12;
  return sp;
}

}  // namespace

TEST_CASE("simulate_matrix shape, ids, and keys") {
  auto sp = base_spec();
  auto m = simulate_matrix(sp);
  CHECK(m.n_persons() == 200);
  CHECK(m.n_items() == 3);
  CHECK_FALSE(m.scored);
  CHECK(m.person_ids.front() == "P001");
  CHECK(m.person_ids.back() == "P200");
  CHECK(m.item_ids[0] == "Q1");
  CHECK(m.item_ids[2] == "Q3");
  REQUIRE(m.keys.size() == 3);
  for (const auto& k : m.keys) {
    CHECK(k.min_category == 1);
    CHECK(k.max_category == 4);
    CHECK(k.direction == Direction::Forward);
  }
  for (int v = 0; v < m.n_persons(); ++v)
    for (int i = 0; i < m.n_items(); ++i) {
      CHECK(m.at(v, i) >= 1);
      CHECK(m.at(v, i) <= 4);
    }
}

TEST_CASE("same seed reproduces the matrix bit for bit") {
  auto sp = base_spec();
  std::vector<double> beta1, beta2;
  auto a = simulate_matrix(sp, &beta1);
  auto b = simulate_matrix(sp, &beta2);
  CHECK(a.cells == b.cells);
  REQUIRE(beta1.size() == beta2.size());
  for (size_t v = 0; v < beta1.size(); ++v) CHECK(beta1[v] == beta2[v]);

  sp.seed = 13;
  auto c = simulate_matrix(sp);
  CHECK(a.cells != c.cells);
}

TEST_CASE("reverse items emit mirrored codes") {
  auto sp = base_spec();
  sp.n_persons = 500;
  sp.reverse_items = {"Q2"};
  std::vector<double> beta;
  auto rev = simulate_matrix(sp, &beta);
  CHECK(rev.keys[1].direction == Direction::Reverse);

  // same stream without reversal: identical latent draws, mirrored emission
  sp.reverse_items = {};
  auto fwd = simulate_matrix(sp);
  for (int v = 0; v < rev.n_persons(); ++v) {
    CHECK(rev.at(v, 0) == fwd.at(v, 0));
    CHECK(rev.at(v, 1) == 5 - fwd.at(v, 1));  // code x maps to max+min-x
    CHECK(rev.at(v, 2) == fwd.at(v, 2));
  }

  // scoring undoes the reversal: internal scores match the forward run
  auto srev = apply_scoring(rev);
  auto sfwd = apply_scoring(fwd);
  CHECK(srev.cells == sfwd.cells);
}

TEST_CASE("abilities respect the requested moments") {
  auto sp = base_spec();
  sp.n_persons = 20000;
  sp.beta_mean = 0.7;
  sp.beta_sd = 0.4;
  std::vector<double> beta;
  simulate_matrix(sp, &beta);
  CHECK(mean(beta) == doctest::Approx(0.7).epsilon(0.02));
  CHECK(std::sqrt(variance_pop(beta)) == doctest::Approx(0.4).epsilon(0.02));
}

TEST_CASE("category frequencies match the model mix") {
  // quadrature oracle for P(X=k) under beta ~ N(0,1) at delta = 0
  auto sp = base_spec();
  sp.n_persons = 40000;
  sp.deltas = {0.0};
  sp.seed = 3;
  auto m = simulate_matrix(sp);

  const int grid = 400;
  std::vector<double> expect(4, 0.0);
  double wsum = 0;
  for (int g = 0; g < grid; ++g) {
    double x = -5.0 + 10.0 * (g + 0.5) / grid;
    double w = std::exp(-0.5 * x * x);
    auto p = rsm_category_probs(x, 0.0, sp.tau);
    for (int k = 0; k < 4; ++k) expect[k] += w * p[k];
    wsum += w;
  }
  for (auto& e : expect) e /= wsum;

  std::vector<double> freq(4, 0.0);
  for (int v = 0; v < m.n_persons(); ++v) freq[m.at(v, 0) - 1] += 1.0;
  for (auto& f : freq) f /= m.n_persons();
  for (int k = 0; k < 4; ++k) CHECK(freq[k] == doctest::Approx(expect[k]).scale(1.0).epsilon(0.01));
}

TEST_CASE("custom item ids and id padding") {
  auto sp = base_spec();
  sp.n_persons = 1500;
  sp.item_ids = {"03A", "03B", "03C"};
  auto m = simulate_matrix(sp);
  CHECK(m.item_ids[1] == "03B");
  CHECK(m.person_ids.front() == "P0001");

  sp.item_ids = {"onlytwo", "ids"};
  CHECK_THROWS_AS(simulate_matrix(sp), std::invalid_argument);
  sp.item_ids.clear();
  sp.reverse_items = {"nosuch"};
  CHECK_THROWS_AS(simulate_matrix(sp), std::invalid_argument);
}

TEST_CASE("csv round trip") {
  auto sp = base_spec();
  sp.n_persons = 25;
  sp.reverse_items = {"Q3"};
  auto m = simulate_matrix(sp);
  auto data = response_csv(m);
  auto keys = keys_csv(m.keys);

  CHECK(data.rfind("person_id,Q1,Q2,Q3", 0) == 0);
  CHECK(keys.rfind("item_id,direction,min,max", 0) == 0);
  CHECK(keys.find("Q3,R,1,4") != std::string::npos);
  CHECK(keys.find("Q1,F,1,4") != std::string::npos);

  // write out, load back, compare cells
  {
    std::ofstream d("test_simulate_data.csv");
    d << data;
    std::ofstream k("test_simulate_keys.csv");
    k << keys;
  }
  auto loaded = load_response_csv("test_simulate_data.csv");
  auto lkeys = load_keys_csv("test_simulate_keys.csv");
  attach_keys(loaded, lkeys);
  CHECK(loaded.cells == m.cells);
  CHECK(loaded.person_ids == m.person_ids);
  CHECK(apply_scoring(loaded).cells == apply_scoring(m).cells);
  std::remove("test_simulate_data.csv");
  std::remove("test_simulate_keys.csv");
}

TEST_CASE("dichotomous generation with a zero threshold") {
  SimulateSpec sp;
  sp.n_persons = 30000;
  sp.deltas = {0.4};
  sp.tau = {0.0};
  sp.min_category = 0;
  sp.seed = 8;
  std::vector<double> beta;
  auto m = simulate_matrix(sp, &beta);
  // empirical P(X=1 | beta in a narrow band) tracks the logistic curve
  double hits = 0, count = 0;
  for (int v = 0; v < m.n_persons(); ++v) {
    if (std::fabs(beta[v] - 0.4) < 0.1) {
      count += 1;
      hits += m.at(v, 0);
    }
  }
  REQUIRE(count > 500);
  CHECK(hits / count == doctest::Approx(0.5).scale(1.0).epsilon(0.05));
}
