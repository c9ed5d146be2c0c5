#pragma once

#include "hcantor/hcantor.hpp"

namespace fixtures {

using hcantor::BranchSystem;
using hcantor::Rational;

inline Rational q(long long p, long long d = 1) { return Rational(p, d); }

inline BranchSystem ternary() {
  return hcantor::make_affine_system({q(0), q(1)}, {{q(0), q(1, 3)}, {q(2, 3), q(1)}}, {1, 1});
}

inline BranchSystem ternary_flip() {
  return hcantor::make_affine_system({q(0), q(1)}, {{q(0), q(1, 3)}, {q(2, 3), q(1)}}, {1, -1});
}

inline BranchSystem two_scale() {
  return hcantor::make_affine_system({q(0), q(1, 2)}, {{q(0), q(1, 4)}, {q(3, 8), q(1, 2)}}, {1, 1});
}

inline BranchSystem three_branch() {
  return hcantor::make_affine_system({q(0), q(1)}, {{q(0), q(1, 5)}, {q(2, 5), q(3, 5)}, {q(4, 5), q(1)}},
                                     {1, -1, 1});
}

inline BranchSystem perturbed(double a1 = 0.01, double a2 = 0.0) {
  return hcantor::make_perturbed_system(ternary(), {a1, a2});
}

}  // namespace fixtures
