#pragma once

#include <stdexcept>
#include <string>

namespace qdm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

#define QDM_DEFINE_ERROR(Name)                                                 \
    class Name : public Error {                                                \
      public:                                                                  \
        using Error::Error;                                                    \
    }

QDM_DEFINE_ERROR(DimensionMismatch);
QDM_DEFINE_ERROR(ZeroVector);
QDM_DEFINE_ERROR(ZeroProbabilityEvent);
QDM_DEFINE_ERROR(NotNormalized);
QDM_DEFINE_ERROR(InvalidArgument);
QDM_DEFINE_ERROR(InvalidProbability);
QDM_DEFINE_ERROR(NoQuantumRepresentation);
QDM_DEFINE_ERROR(UnresolvedUtility);
QDM_DEFINE_ERROR(MissingPayoff);
QDM_DEFINE_ERROR(UnknownEvent);
QDM_DEFINE_ERROR(MalformedPattern);
QDM_DEFINE_ERROR(MalformedProblem);
QDM_DEFINE_ERROR(UnknownScenario);
QDM_DEFINE_ERROR(IoError);
QDM_DEFINE_ERROR(ValidationError);

#undef QDM_DEFINE_ERROR

/// JSON syntax error with a 1-based source location.
class ParseError : public Error {
  public:
    ParseError(const std::string &what, std::size_t line, std::size_t column)
        : Error(what), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

} // namespace qdm
