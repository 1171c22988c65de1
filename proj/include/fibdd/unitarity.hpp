#pragma once

#include "fibdd/types.hpp"

namespace fibdd::evolve {

/// Closest unitary in Frobenius norm (polar factor), via SVD.
Matrix closest_unitary(const Matrix& a);

/// Long products of unitaries drift; the guard re-unitarizes by polar
/// projection once the defect passes the threshold and keeps a tally for the
/// run metadata.
struct UnitarityGuard {
  double threshold = 1e-9;
  long long checks = 0;
  long long events = 0;
  double worst_defect = 0.0;

  /// Returns true if the matrix was re-unitarized.
  bool maintain(Matrix& u);
};

}  // namespace fibdd::evolve
