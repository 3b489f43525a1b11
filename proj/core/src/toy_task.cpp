#include "consel/toy_task.hpp"

#include <cstdio>

#include "consel/rng.hpp"

namespace consel {

namespace vocab {

char symbol(TokenId t) {
  if (t >= 0 && t <= 9) return static_cast<char>('0' + t);
  switch (t) {
    case kPlus: return '+';
    case kMinus: return '-';
    case kTimes: return '*';
    case kEquals: return '=';
    case kEos: return '$';
    case kPad: return '_';
    default: throw Error("token out of vocabulary: " + std::to_string(t));
  }
}

TokenId token(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  switch (c) {
    case '+': return kPlus;
    case '-': return kMinus;
    case '*': return kTimes;
    case '=': return kEquals;
    case '$': return kEos;
    case '_': return kPad;
    default: throw Error(std::string("character out of vocabulary: '") + c + "'");
  }
}

std::vector<TokenId> encode(std::string_view text) {
  std::vector<TokenId> out;
  out.reserve(text.size());
  for (char c : text) out.push_back(token(c));
  return out;
}

std::string decode_response(const std::vector<TokenId>& tokens) {
  std::string out;
  for (TokenId t : tokens) {
    if (t == kEos) break;
    out.push_back(symbol(t));
  }
  return out;
}

}  // namespace vocab

int ToyTaskSpec::prompt_count() const {
  return static_cast<int>(operators.size()) * operand_count() * operand_count();
}

void validate(const ToyTaskSpec& spec) {
  if (spec.modulus < 2) throw Error("modulus must be at least 2");
  if (spec.operand_min < 0 || spec.operand_max < spec.operand_min)
    throw Error("invalid operand range");
  if (spec.answer_length < 1) throw Error("answer_length must be at least 1");
  if (spec.operators.empty()) throw Error("no operators");
  for (char op : spec.operators)
    if (op != '+' && op != '-' && op != '*') throw Error(std::string("unsupported operator '") + op + "'");
  if (std::to_string(spec.modulus - 1).size() > static_cast<std::size_t>(spec.answer_length))
    throw Error("answer_length too short for modulus");
}

ParsedPrompt parse_prompt(const ToyTaskSpec& spec, std::string_view prompt) {
  ParsedPrompt p;
  std::size_t i = 0;
  auto read_int = [&](int& out) {
    const std::size_t start = i;
    out = 0;
    while (i < prompt.size() && prompt[i] >= '0' && prompt[i] <= '9') out = out * 10 + (prompt[i++] - '0');
    if (i == start) throw Error("malformed prompt: " + std::string(prompt));
  };
  read_int(p.a);
  if (i >= prompt.size()) throw Error("malformed prompt: " + std::string(prompt));
  p.op = prompt[i++];
  read_int(p.b);
  if (i + 1 != prompt.size() || prompt[i] != '=') throw Error("malformed prompt: " + std::string(prompt));
  if (spec.operators.find(p.op) == std::string::npos)
    throw Error("operator not in task: " + std::string(prompt));
  if (p.a < spec.operand_min || p.a > spec.operand_max || p.b < spec.operand_min || p.b > spec.operand_max)
    throw Error("operand out of range: " + std::string(prompt));
  return p;
}

std::string evaluate_answer(const ToyTaskSpec& spec, const ParsedPrompt& p) {
  long long v = 0;
  switch (p.op) {
    case '+': v = static_cast<long long>(p.a) + p.b; break;
    case '-': v = static_cast<long long>(p.a) - p.b; break;
    case '*': v = static_cast<long long>(p.a) * p.b; break;
    default: throw Error(std::string("unsupported operator '") + p.op + "'");
  }
  v %= spec.modulus;
  if (v < 0) v += spec.modulus;
  return std::to_string(v);
}

std::vector<QueryRecord> gen_task(const ToyTaskSpec& spec, int n, std::uint64_t seed) {
  validate(spec);
  if (n < 1) throw Error("n must be at least 1");
  Rng rng(seed);
  std::vector<QueryRecord> out;
  out.reserve(static_cast<std::size_t>(n));
  const auto range = static_cast<std::uint64_t>(spec.operand_count());
  for (int i = 0; i < n; ++i) {
    ParsedPrompt p;
    p.a = spec.operand_min + static_cast<int>(rng.below(range));
    p.op = spec.operators[rng.below(spec.operators.size())];
    p.b = spec.operand_min + static_cast<int>(rng.below(range));
    char id[16];
    std::snprintf(id, sizeof id, "q%05d", i);
    out.push_back({id, std::to_string(p.a) + p.op + std::to_string(p.b) + "=", evaluate_answer(spec, p)});
  }
  return out;
}

}  // namespace consel
