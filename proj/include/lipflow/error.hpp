#pragma once

#include <stdexcept>
#include <string>

namespace lipflow {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// integrand
struct MaximizerOnBoundary : Error { using Error::Error; };
struct NonConvergence : Error { using Error::Error; };
struct IdentityViolation : Error { using Error::Error; };
struct GrowthViolation : Error { using Error::Error; };

// geometry
struct MeshFailure : Error { using Error::Error; };

// boundary
struct Infeasible : Error {
  Infeasible(const std::string& what, double when) : Error(what), t(when) {}
  double t;
};
struct WideningInsufficient : Error { using Error::Error; };

// mollify
struct InitialMismatch : Error { using Error::Error; };

// solver
struct InnerNonConvergence : Error { using Error::Error; };
struct InfeasibleConstraint : Error { using Error::Error; };
struct EstimateViolated : Error {
  EstimateViolated(const std::string& what, int index) : Error(what), step(index) {}
  int step;
};
struct BoundaryMismatch : Error { using Error::Error; };

// verify
struct GridMismatch : Error { using Error::Error; };

// barrier
struct SearchExhausted : Error {
  SearchExhausted(const std::string& what, std::string param)
      : Error(what), parameter(std::move(param)) {}
  std::string parameter;
};

// cli / configuration
struct ConfigError : Error { using Error::Error; };

}  // namespace lipflow
