#pragma once

#include <stdexcept>
#include <string>

namespace qdiff {

/// Parameter corners where a bound or estimator is mathematically undefined
/// rather than merely large. Sweep drivers catch these and emit an explicit
/// marker instead of propagating infinities.
enum class degeneracy {
  pure_state_singular,       // det sigma = 1: SLD / QFI solve singular
  degenerate_pure_state,     // T = 1 and diffusion 0: QFI formally divergent
  uninformative_quadrature,  // measured quadrature carries no parameter dependence
  non_identifiable,          // variance slope B = 0, estimator undefined
  undefined_limit,           // lambda->0 limit of the scheme's CRB does not exist
};

class degenerate_error : public std::domain_error {
 public:
  degenerate_error(degeneracy kind, const std::string& what)
      : std::domain_error(what), kind_(kind) {}
  degeneracy kind() const noexcept { return kind_; }

 private:
  degeneracy kind_;
};

class ill_conditioned_error : public std::runtime_error {
 public:
  ill_conditioned_error(double cond, const std::string& what)
      : std::runtime_error(what), cond_(cond) {}
  double condition() const noexcept { return cond_; }

 private:
  double cond_;
};

}  // namespace qdiff
