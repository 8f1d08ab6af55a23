#pragma once

#include <stdexcept>
#include <string>

namespace lowrank {

/// Base class for every error raised by the library. `kind()` is the
/// stable machine-readable name written into error JSON files.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define LOWRANK_DEFINE_ERROR(Name)                                        \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& what) : Error(#Name, what) {}        \
  };

LOWRANK_DEFINE_ERROR(RankDeficient)
LOWRANK_DEFINE_ERROR(NotHermitian)
LOWRANK_DEFINE_ERROR(DimensionMismatch)
LOWRANK_DEFINE_ERROR(CutoffTooSmall)
LOWRANK_DEFINE_ERROR(NonPositiveDefinite)
LOWRANK_DEFINE_ERROR(StepTooNarrow)
LOWRANK_DEFINE_ERROR(ToleranceFailure)
LOWRANK_DEFINE_ERROR(RankExceedsDim)
LOWRANK_DEFINE_ERROR(GridMismatch)
LOWRANK_DEFINE_ERROR(NonPositiveArgument)
LOWRANK_DEFINE_ERROR(InvalidArgument)
LOWRANK_DEFINE_ERROR(ConfigError)

#undef LOWRANK_DEFINE_ERROR

/// Raised by the low-rank solver when the factor loses rank mid-run.
class RankDeficientAt : public RankDeficient {
 public:
  RankDeficientAt(double time, const std::string& what)
      : RankDeficient(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace lowrank
