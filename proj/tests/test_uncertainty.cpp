#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "consel/rng.hpp"
#include "consel/uncertainty.hpp"

using namespace consel;

namespace {

ResponseRecord with_logprobs(std::vector<double> lps) {
  ResponseRecord r;
  r.query_id = "q";
  r.tokens.assign(lps.size(), 1);
  r.token_logprobs = std::move(lps);
  return r;
}

}  // namespace

TEST_CASE("ppl examples") {
  CHECK(ppl(with_logprobs({std::log(0.5), std::log(0.5)})) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ppl(with_logprobs({0.0})) == 1.0);
  // exp(-(ln .1 + ln .4 + ln .9) / 3), evaluated independently: 3.028534321386899
  CHECK(ppl(with_logprobs({std::log(0.1), std::log(0.4), std::log(0.9)})) ==
        doctest::Approx(3.028534321386899).epsilon(1e-12));
}

TEST_CASE("ppl errors") {
  CHECK_THROWS_WITH_AS(ppl(ResponseRecord{}), "empty response", Error);
  CHECK_THROWS_WITH_AS(ppl(with_logprobs({-0.2, 0.1})), "invalid logprob", Error);
}

TEST_CASE("ppl properties on random traces") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> lps(1 + rng.below(12));
    for (double& v : lps) v = -rng.uniform(0.0, 5.0);
    const double base = ppl(with_logprobs(lps));
    CHECK(base >= 1.0);

    auto shuffled = lps;
    std::reverse(shuffled.begin(), shuffled.end());
    std::rotate(shuffled.begin(), shuffled.begin() + static_cast<long>(rng.below(shuffled.size())), shuffled.end());
    CHECK(ppl(with_logprobs(shuffled)) == doctest::Approx(base).epsilon(1e-12));

    auto lower = lps;
    lower[rng.below(lower.size())] -= 0.25;
    CHECK(ppl(with_logprobs(lower)) > base);

    CHECK(uncertainty(with_logprobs(lps), UncertaintyKind::ppl) == base);
  }
  CHECK(ppl(with_logprobs({0.0, 0.0, 0.0})) == 1.0);
}

TEST_CASE("entropy score") {
  auto r = with_logprobs({-1.0, -1.0});
  r.token_entropies = {std::log(10.0), std::log(10.0)};
  CHECK(entropy_score(r) == doctest::Approx(2.302585).epsilon(1e-6));
  r.token_entropies = {0.0, 0.0};
  CHECK(entropy_score(r) == 0.0);
  r.token_entropies = {0.5, 1.5};
  CHECK(entropy_score(r) == 1.0);
  r.token_entropies.clear();
  CHECK_THROWS_WITH_AS(entropy_score(r), "entropy trace unavailable", Error);
}

TEST_CASE("margin score") {
  auto r = with_logprobs({0.0, 0.0, 0.0});
  r.token_margins = {1.0, 1.0, 1.0};
  CHECK(margin_score(r) == 1.0);
  r = with_logprobs({-0.1, -0.1});
  r.token_margins = {0.2, 0.4};
  CHECK(margin_score(r) == doctest::Approx(0.3));
  r.token_margins = {0.0, 0.0};  // uniform over two symbols
  CHECK(margin_score(r) == 0.0);
  r.token_margins.clear();
  CHECK_THROWS_WITH_AS(margin_score(r), "margin trace unavailable", Error);
}

TEST_CASE("uncertainty dispatch and direction") {
  auto r = with_logprobs({std::log(0.5), std::log(0.5)});
  CHECK(uncertainty(r, UncertaintyKind::ppl) == doctest::Approx(2.0));

  r.token_entropies = {0.0, 0.0};
  CHECK(uncertainty(r, UncertaintyKind::entropy, EntropyDirection::larger_is_more_uncertain) == 1.0);
  r.token_entropies = {1.0, 3.0};
  CHECK(uncertainty(r, UncertaintyKind::entropy) == 3.0);
  CHECK(uncertainty(r, UncertaintyKind::entropy, EntropyDirection::smaller_is_more_uncertain) ==
        doctest::Approx(1.0 + 1.0 / 3.0));

  r.token_margins = {1.0, 1.0};
  CHECK(uncertainty(r, UncertaintyKind::margin) == 1.0);
  CHECK(uncertainty(r, UncertaintyKind::margin, EntropyDirection::smaller_is_more_uncertain) == 2.0);
  r.token_margins = {0.0, 0.0};
  CHECK(uncertainty(r, UncertaintyKind::margin) == 2.0);

  // Every kind lands in [1, inf).
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    r.token_entropies = {rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0)};
    r.token_margins = {rng.uniform(), rng.uniform()};
    for (auto kind : {UncertaintyKind::ppl, UncertaintyKind::entropy, UncertaintyKind::margin})
      for (auto dir : {EntropyDirection::larger_is_more_uncertain, EntropyDirection::smaller_is_more_uncertain})
        CHECK(uncertainty(r, kind, dir) >= 1.0);
  }
}
