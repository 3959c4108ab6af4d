#pragma once

#include <stdexcept>
#include <string>

namespace ptwg {

// Exit-code family of an error: 1 configuration, 2 numerical failure,
// 3 invariant violation.
enum class ErrorClass { config = 1, numeric = 2, invariant = 3 };

class Error : public std::runtime_error {
 public:
  Error(const std::string& name, const std::string& what, ErrorClass cls)
      : std::runtime_error(name + ": " + what), name_(name), cls_(cls) {}
  const std::string& name() const { return name_; }
  ErrorClass error_class() const { return cls_; }

 private:
  std::string name_;
  ErrorClass cls_;
};

#define PTWG_ERROR(Name, Cls)                                   \
  class Name : public Error {                                   \
   public:                                                      \
    explicit Name(const std::string& what)                      \
        : Error(#Name, what, ErrorClass::Cls) {}                \
  };

PTWG_ERROR(ConfigError, config)
PTWG_ERROR(SimpleSpectrumViolation, config)
PTWG_ERROR(GridMismatch, config)
PTWG_ERROR(GridError, config)
PTWG_ERROR(DomainError, numeric)
PTWG_ERROR(OnCutError, numeric)
PTWG_ERROR(SingularPoint, numeric)
PTWG_ERROR(ThresholdSingularity, numeric)
PTWG_ERROR(TailBoundFailure, numeric)
PTWG_ERROR(NeumannSeriesDivergence, numeric)
PTWG_ERROR(NoRoot, numeric)
PTWG_ERROR(BorderlineCase, numeric)
PTWG_ERROR(ConvergenceFailure, numeric)
PTWG_ERROR(ResolutionLimit, numeric)
PTWG_ERROR(OnSpectrum, numeric)
PTWG_ERROR(InvariantViolation, invariant)

#undef PTWG_ERROR

}  // namespace ptwg
