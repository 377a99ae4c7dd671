#include "bribery/rational.hpp"

#include <cctype>

#include "bribery/error.hpp"

namespace bribery {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

[[noreturn]] void bad(std::string_view text) {
  throw Error(ErrorCode::kParse, "malformed rational \"" + std::string(text) + "\"");
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }

  Rational result;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) bad(text);
    const BigInt d{std::string(den)};
    if (d == 0) throw Error(ErrorCode::kParse, "zero denominator in \"" + std::string(text) + "\"");
    result = Rational(BigInt{std::string(num)}, d);
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    auto whole = body.substr(0, dot);
    auto frac = body.substr(dot + 1);
    if (whole.empty()) whole = "0";
    if (!all_digits(whole) || !all_digits(frac)) bad(text);
    BigInt scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    result = Rational(BigInt(std::string(whole)) * scale + BigInt(std::string(frac)), scale);
  } else {
    if (!all_digits(body)) bad(text);
    result = Rational(BigInt(std::string(body)));
  }
  return negative ? Rational(-result) : result;
}

std::string to_string(const Rational& value) {
  const auto num = boost::multiprecision::numerator(value);
  const auto den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::string to_decimal_string(const Rational& value, int digits) {
  BigInt scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  const bool negative = value < 0;
  const Rational mag = abs(value) * scale;
  const BigInt num = boost::multiprecision::numerator(mag);
  const BigInt den = boost::multiprecision::denominator(mag);
  BigInt q = num / den;
  if ((num % den) * 2 >= den) q += 1;

  std::string s = q.str();
  if (digits > 0) {
    if (static_cast<int>(s.size()) <= digits) s.insert(0, digits + 1 - s.size(), '0');
    s.insert(s.size() - digits, ".");
  }
  if (negative && q != 0) s.insert(0, "-");
  return s;
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kInvalidParams: return "invalid_params";
    case ErrorCode::kVariantMismatch: return "variant_mismatch";
    case ErrorCode::kEnumerationLimit: return "enumeration_limit";
    case ErrorCode::kNotPermutation: return "not_permutation";
    case ErrorCode::kInvalidConfig: return "invalid_config";
    case ErrorCode::kDoubleCommit: return "double_commit";
    case ErrorCode::kCommitAfterExpiration: return "commit_after_expiration";
    case ErrorCode::kCommitAfterAttackOrdered: return "commit_after_attack_ordered";
    case ErrorCode::kUnknownNode: return "unknown_node";
    case ErrorCode::kAlreadySettled: return "already_settled";
    case ErrorCode::kInvalidOracle: return "invalid_oracle";
    case ErrorCode::kTimeRegression: return "time_regression";
    case ErrorCode::kUnsettledMinions: return "unsettled_minions";
    case ErrorCode::kWrongConsensus: return "wrong_consensus";
    case ErrorCode::kCapExceeded: return "cap_exceeded";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace bribery
