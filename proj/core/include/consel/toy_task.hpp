#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "consel/types.hpp"

namespace consel {

/// Closed 16-symbol vocabulary shared by prompts and responses.
namespace vocab {
inline constexpr TokenId kPlus = 10;
inline constexpr TokenId kMinus = 11;
inline constexpr TokenId kTimes = 12;
inline constexpr TokenId kEquals = 13;
inline constexpr TokenId kEos = 14;
inline constexpr TokenId kPad = 15;
inline constexpr int kSize = 16;

char symbol(TokenId t);
/// Throws Error for characters outside the vocabulary.
TokenId token(char c);
std::vector<TokenId> encode(std::string_view text);
/// Response text: symbols up to (not including) the first end marker.
std::string decode_response(const std::vector<TokenId>& tokens);
}  // namespace vocab

/// Synthetic modular-arithmetic task: prompts "a<op>b=", answers the result
/// reduced mod `modulus`, written without padding.
struct ToyTaskSpec {
  int modulus = 10;
  int operand_min = 0;
  int operand_max = 9;
  /// Maximum generated positions; the answer must fit.
  int answer_length = 1;
  std::string operators = "+";

  int operand_count() const { return operand_max - operand_min + 1; }
  /// Number of distinct (a, op, b) prompts.
  int prompt_count() const;
};

void validate(const ToyTaskSpec& spec);

struct ParsedPrompt {
  int a = 0;
  int b = 0;
  char op = '+';
};

ParsedPrompt parse_prompt(const ToyTaskSpec& spec, std::string_view prompt);
std::string evaluate_answer(const ToyTaskSpec& spec, const ParsedPrompt& p);

/// `n` deterministic queries with ids "q00000", "q00001", ...
std::vector<QueryRecord> gen_task(const ToyTaskSpec& spec, int n, std::uint64_t seed);

}  // namespace consel
