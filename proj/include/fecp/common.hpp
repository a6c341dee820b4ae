#ifndef FECP_COMMON_HPP
#define FECP_COMMON_HPP

#include <stdexcept>
#include <string>

namespace fecp {

/// Failure kinds surfaced by the library. Each maps 1:1 to a documented
/// error condition of the public operations.
enum class ErrorCode {
  NonManifold,
  DegenerateCell,
  DanglingVertex,
  NotBoundarySimplex,
  NotContractible,
  LevelMismatch,
  UnsupportedPair,
  SingularSystem,
  NotInRange,
  QuadratureDomainMismatch,
  InfeasibleTrace,
  Infeasible,
  ParseError,
  IoError,
  InvalidArgument
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), m_code(code) {}

  ErrorCode code() const { return m_code; }

 private:
  ErrorCode m_code;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace fecp

#endif
