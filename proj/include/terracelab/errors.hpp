#pragma once

#include <stdexcept>
#include <string>

namespace terracelab {

// Failure classes map one-to-one onto CLI exit codes.
enum class ErrorClass {
  Validation = 1,  // assumption / precondition / validation failure
  Numerical = 2,   // solver, convergence, or classification failure
  Config = 3,      // malformed or inconsistent configuration
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), class_(cls), kind_(std::move(kind)) {}

  ErrorClass error_class() const noexcept { return class_; }
  const std::string& kind() const noexcept { return kind_; }

 private:
  ErrorClass class_;
  std::string kind_;
};

#define TERRACELAB_DEFINE_ERROR(Name, Class)                                      \
  class Name : public Error {                                                     \
   public:                                                                        \
    explicit Name(const std::string& what) : Error(ErrorClass::Class, #Name, what) {} \
  };

TERRACELAB_DEFINE_ERROR(RangeError, Validation)
TERRACELAB_DEFINE_ERROR(DomainError, Validation)
TERRACELAB_DEFINE_ERROR(PreconditionError, Validation)
TERRACELAB_DEFINE_ERROR(DegenerateZeroError, Validation)
TERRACELAB_DEFINE_ERROR(ResolutionError, Numerical)
TERRACELAB_DEFINE_ERROR(SingularityError, Numerical)
TERRACELAB_DEFINE_ERROR(AmbiguousConnectionError, Numerical)
TERRACELAB_DEFINE_ERROR(DecompositionFailure, Numerical)
TERRACELAB_DEFINE_ERROR(AmbiguityError, Numerical)
TERRACELAB_DEFINE_ERROR(ConstructionError, Numerical)
TERRACELAB_DEFINE_ERROR(InconclusiveError, Numerical)
TERRACELAB_DEFINE_ERROR(InstabilityError, Numerical)
TERRACELAB_DEFINE_ERROR(MonotonicityViolation, Numerical)
TERRACELAB_DEFINE_ERROR(ExtractionError, Numerical)
TERRACELAB_DEFINE_ERROR(PreTaError, Numerical)
TERRACELAB_DEFINE_ERROR(ConfigError, Config)

#undef TERRACELAB_DEFINE_ERROR

}  // namespace terracelab
