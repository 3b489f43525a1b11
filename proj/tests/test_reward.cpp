#include <doctest.h>

#include <cmath>
#include <numeric>

#include "consel/reward.hpp"
#include "consel/rng.hpp"

using namespace consel;

TEST_CASE("answer normalization") {
  CHECK(verify_answer(" 42 ", "42") == 1);
  CHECK(verify_answer("042", "42") == 1);
  CHECK(verify_answer("-07", "-7") == 1);
  CHECK(verify_answer("0", "000") == 1);
  CHECK(verify_answer("41", "42") == 0);
  CHECK(verify_answer("", "0") == 0);
  CHECK(verify_answer("abc", "abc") == 1);
  CHECK(normalize_answer("\t12\n") == "12");
}

TEST_CASE("verify is symmetric and reflexive") {
  const std::vector<std::string> xs = {"1", "01", " 1", "2", "x", "", "-0", "0", "10"};
  for (const auto& a : xs) {
    CHECK(verify_answer(a, a) == 1);
    for (const auto& b : xs) CHECK(verify_answer(a, b) == verify_answer(b, a));
  }
}

TEST_CASE("grpo examples") {
  const std::vector<int> r = {1, 0, 0, 0};
  const auto a = advantages(r, AdvantageEstimator::grpo);
  REQUIRE(a.size() == 4);
  CHECK(a[0] == doctest::Approx(1.7320508075688772));
  for (int i = 1; i < 4; ++i) CHECK(a[i] == doctest::Approx(-0.5773502691896258));

  for (const auto& flat : {std::vector<int>{1, 1, 1}, std::vector<int>{0, 0, 0, 0}}) {
    for (double v : advantages(flat, AdvantageEstimator::grpo)) CHECK(v == 0.0);
  }
}

TEST_CASE("rloo examples") {
  const std::vector<int> r = {1, 0, 0, 0};
  const auto a = advantages(r, AdvantageEstimator::rloo);
  CHECK(a[0] == doctest::Approx(1.0));
  CHECK(a[1] == doctest::Approx(-1.0 / 3.0));
  const std::vector<double> one = {1.0};
  CHECK_THROWS_WITH_AS(rloo_advantages(one), "group too small", Error);
}

TEST_CASE("advantage invariants on random groups") {
  Rng rng(3);
  for (int t = 0; t < 300; ++t) {
    const std::size_t k = 2 + rng.below(15);
    std::vector<double> r(k);
    for (double& v : r) v = static_cast<double>(rng.below(2));
    const auto g = grpo_advantages(r);
    const auto l = rloo_advantages(r);
    const double gs = std::accumulate(g.begin(), g.end(), 0.0);
    const double ls = std::accumulate(l.begin(), l.end(), 0.0);
    CHECK(std::abs(gs) < 1e-9);
    CHECK(std::abs(ls) < 1e-9);

    double sq = 0.0;
    for (double v : g) sq += v * v;
    const bool constant = std::all_of(r.begin(), r.end(), [&](double v) { return v == r[0]; });
    if (constant) {
      CHECK(sq == 0.0);
    } else {
      CHECK(sq / static_cast<double>(k) == doctest::Approx(1.0));
      for (std::size_t i = 0; i < k; ++i) {
        CHECK((g[i] > 0) == (r[i] == 1.0));
        CHECK((l[i] > 0) == (r[i] == 1.0));
      }
    }

    // Permutation equivariance.
    std::vector<double> rev(r.rbegin(), r.rend());
    const auto gr = grpo_advantages(rev);
    for (std::size_t i = 0; i < k; ++i) CHECK(gr[i] == doctest::Approx(g[k - 1 - i]));
  }
}
