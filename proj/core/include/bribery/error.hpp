#pragma once

#include <stdexcept>
#include <string>

namespace bribery {

enum class ErrorCode {
  kParse,
  kInvalidParams,
  kVariantMismatch,
  kEnumerationLimit,
  kNotPermutation,
  kInvalidConfig,
  kDoubleCommit,
  kCommitAfterExpiration,
  kCommitAfterAttackOrdered,
  kUnknownNode,
  kAlreadySettled,
  kInvalidOracle,
  kTimeRegression,
  kUnsettledMinions,
  kWrongConsensus,
  kCapExceeded,
  kIo,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bribery
