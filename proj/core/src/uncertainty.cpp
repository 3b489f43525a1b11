#include "consel/uncertainty.hpp"

#include <cmath>
#include <numeric>

namespace consel {

namespace {

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double ppl(const ResponseRecord& response) {
  if (response.tokens.empty() || response.token_logprobs.empty()) throw Error("empty response");
  for (double lp : response.token_logprobs)
    if (!(lp <= 0.0)) throw Error("invalid logprob");
  return std::exp(-mean(response.token_logprobs));
}

double entropy_score(const ResponseRecord& response) {
  if (!response.has_entropies()) throw Error("entropy trace unavailable");
  if (response.token_entropies.size() != response.tokens.size())
    throw Error("length mismatch: tokens vs token_entropies");
  return mean(response.token_entropies);
}

double margin_score(const ResponseRecord& response) {
  if (!response.has_margins()) throw Error("margin trace unavailable");
  if (response.token_margins.size() != response.tokens.size())
    throw Error("length mismatch: tokens vs token_margins");
  return mean(response.token_margins);
}

double uncertainty(const ResponseRecord& response, UncertaintyKind kind, EntropyDirection direction) {
  const bool standard = direction == EntropyDirection::larger_is_more_uncertain;
  switch (kind) {
    case UncertaintyKind::ppl:
      return ppl(response);
    case UncertaintyKind::entropy: {
      const double ent = entropy_score(response);
      return standard ? 1.0 + ent : 1.0 + 1.0 / (1.0 + ent);
    }
    case UncertaintyKind::margin: {
      const double ms = margin_score(response);
      return standard ? 1.0 + (1.0 - ms) : 1.0 + ms;
    }
  }
  throw Error("unknown uncertainty kind");
}

}  // namespace consel
