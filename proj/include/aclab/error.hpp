#pragma once

#include <stdexcept>
#include <string>

namespace aclab {

enum class ErrorKind {
  InvalidArgument,
  NumericFailure,
  ConfigError,
  GeometryDegenerate,
  OutOfChart,
  Topology,
  FoliationViolation,
  NoEquilibrium,
  NoContraction,
  StepSize,
  DegenerateGradient,
  Precondition
};

const char* kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::NumericFailure: return "numeric-failure";
    case ErrorKind::ConfigError: return "config-error";
    case ErrorKind::GeometryDegenerate: return "geometry-degenerate";
    case ErrorKind::OutOfChart: return "out-of-chart";
    case ErrorKind::Topology: return "topology";
    case ErrorKind::FoliationViolation: return "foliation-violation";
    case ErrorKind::NoEquilibrium: return "no-equilibrium";
    case ErrorKind::NoContraction: return "no-contraction";
    case ErrorKind::StepSize: return "step-size";
    case ErrorKind::DegenerateGradient: return "degenerate-gradient";
    case ErrorKind::Precondition: return "precondition";
  }
  return "error";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace aclab
