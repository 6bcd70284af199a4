#pragma once

#include <stdexcept>
#include <string>

namespace gls {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

#define GLS_DEFINE_ERROR(Name)                \
    class Name : public Error {               \
      public:                                 \
        using Error::Error;                   \
    };

GLS_DEFINE_ERROR(InvalidArgument)
GLS_DEFINE_ERROR(UnsupportedKind)
GLS_DEFINE_ERROR(DomainError)
GLS_DEFINE_ERROR(OutOfDomain)
GLS_DEFINE_ERROR(EmptyDomain)
GLS_DEFINE_ERROR(Infeasible)
GLS_DEFINE_ERROR(FamilyMismatch)
GLS_DEFINE_ERROR(ParseError)
GLS_DEFINE_ERROR(IoError)

#undef GLS_DEFINE_ERROR

/// Adaptive quadrature did not reach the requested tolerance.
class NonIntegrable : public Error {
  public:
    NonIntegrable(const std::string& what, double achieved_error)
        : Error(what + " (achieved error " + std::to_string(achieved_error) + ")"),
          achieved_error_(achieved_error) {}

    double achieved_error() const noexcept { return achieved_error_; }

  private:
    double achieved_error_;
};

}  // namespace gls
