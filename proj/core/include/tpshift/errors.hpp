#pragma once

#include <stdexcept>
#include <string>

namespace tpshift {

// Broad failure classes. The CLI maps these onto exit statuses.
enum class ErrorCategory {
  kValidation,  // bad input or violated precondition
  kNumerical,   // an algorithm gave up (quadrature, search budget, ...)
  kRelation,    // a checked mathematical relation failed
};

enum class Errc {
  kInvalidParams,
  kEmptyDeltas,
  kDeltaMismatch,
  kBadGrid,
  kDegenerateInterval,
  kIdenticallyZero,
  kWindowTooSmall,
  kNotGaussian,
  kZeroFunction,
  kOrderAmbiguous,
  kBadArgument,
  kQuadratureNonconvergence,
  kPhaseTracking,
  kNonconvergence,
  kRankDeficient,
  kBudgetExhausted,
  kCombinatorialBlowup,
  kChainViolation,
  kConfig,
};

constexpr ErrorCategory category_of(Errc code) {
  switch (code) {
    case Errc::kQuadratureNonconvergence:
    case Errc::kPhaseTracking:
    case Errc::kNonconvergence:
    case Errc::kRankDeficient:
    case Errc::kBudgetExhausted:
      return ErrorCategory::kNumerical;
    case Errc::kChainViolation:
      return ErrorCategory::kRelation;
    default:
      return ErrorCategory::kValidation;
  }
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  Errc code_;
};

}  // namespace tpshift
