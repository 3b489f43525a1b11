#pragma once

#include "consel/types.hpp"

namespace consel {

/// Perplexity exp(-mean logprob). Always >= 1.
double ppl(const ResponseRecord& response);

/// Mean per-step predictive entropy. Requires `token_entropies`.
double entropy_score(const ResponseRecord& response);

/// Mean per-step gap between the two most likely tokens. Requires `token_margins`.
double margin_score(const ResponseRecord& response);

/// Subjective uncertainty on [1, inf), larger meaning more uncertain.
///
///   ppl                                  -> ppl (unshifted)
///   entropy, larger_is_more_uncertain    -> 1 + ENT
///   entropy, smaller_is_more_uncertain   -> 1 + 1 / (1 + ENT)
///   margin,  larger_is_more_uncertain    -> 1 + (1 - MS)
///   margin,  smaller_is_more_uncertain   -> 1 + MS
///
/// The direction flag names the entropy reading; margin always takes the
/// opposite sense, so the default treats a small top-2 gap as uncertain.
double uncertainty(const ResponseRecord& response, UncertaintyKind kind,
                   EntropyDirection direction = EntropyDirection::larger_is_more_uncertain);

}  // namespace consel
