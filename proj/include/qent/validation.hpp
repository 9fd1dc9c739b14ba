#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qent {

/// Outcome of one randomized invariant check. `worst` is the largest
/// per-sample violation metric; a sample fails when it exceeds `tolerance`.
struct PropertyResult {
  std::string name;
  int samples = 0;
  int failures = 0;
  double worst = 0.0;
  double tolerance = 0.0;

  bool passed() const { return failures == 0 && samples > 0; }
};

struct PropertySuiteConfig {
  int samples = 500;
  std::uint64_t seed = 20240601;
};

/// Trace, Hermiticity and positivity of propagated random states under every
/// environment kind.
PropertyResult check_propagation_invariants(const PropertySuiteConfig& cfg);
/// fixed-z lower <= optimized lower <= upper, and quasi-pure <= upper.
PropertyResult check_estimator_ordering(const PropertySuiteConfig& cfg);
/// Optimized lower bound equals the Wootters value for two qubits.
PropertyResult check_two_qubit_collapse(const PropertySuiteConfig& cfg);
/// Pure-state concurrence equals sqrt(2 (1 - tr rho_r^2)).
PropertyResult check_pure_state_purity(const PropertySuiteConfig& cfg);
/// Pure, Wootters and quasi-pure values are unchanged by U1 (x) U2.
PropertyResult check_local_unitary_invariance(const PropertySuiteConfig& cfg);
/// A^{lm}_{jk} assembled from the T^alpha matches the antisymmetric-projector
/// matrix elements computed directly.
PropertyResult check_tensor_reconstruction(const PropertySuiteConfig& cfg);

std::vector<PropertyResult> run_property_suites(const PropertySuiteConfig& cfg = {});

}  // namespace qent
