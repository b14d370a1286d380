#pragma once

#include "muskat/pseudo_interface.hpp"
#include "muskat/subsolution.hpp"

namespace muskat::testing {

/// Bump 0.1/(1+s^2), c = 1, N = 2, alpha = 1/2, T = 1.
inline MixingConfig canonical_config() {
  return make_mixing_config(2, 0.5, 0.0, 1.0, ProfileFunction::rational_bump(0.1, 0.0, 1.0),
                            ProfileFunction::constant(1.0), SamplingGrid(40.0, 801, 4.0));
}

/// Built once per test binary.
inline const PseudoInterface& canonical_interface() {
  static const PseudoInterface pi = PseudoInterface::build(canonical_config());
  return pi;
}

inline QuadSpec field_quad() {
  QuadSpec q;
  q.rel_tol = 1e-10;
  q.abs_tol = 1e-14;
  return q;
}

inline const SubsolutionFields& canonical_fields() {
  static const SubsolutionFields f(canonical_interface(), 0.05, FieldOptions{field_quad()});
  return f;
}

}  // namespace muskat::testing
