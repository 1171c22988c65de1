#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "fibdd/types.hpp"

namespace fibdd::spinchain {

/// Open chain of spin-1/2 sites. Site 1 is the leftmost (most significant)
/// tensor factor; basis index bit (length - j) holds site j, with bit 0
/// meaning sigma^z = +1.
struct ChainSpec {
  int length = 8;        // L
  double quartic = 1.0;  // V

  int hilbert_dim() const { return 1 << length; }
  void validate() const;
};

/// Pauli string c * prod_j X_j^{x} Z_j^{z} in the symplectic (x,z)-mask
/// representation. Every operator in this module is a sum of few strings,
/// which keeps construction exact and cheap at any L we simulate.
struct PauliString {
  int sites = 0;
  std::uint32_t x_mask = 0;
  std::uint32_t z_mask = 0;
  Complex coeff{1.0, 0.0};

  PauliString operator*(const PauliString& rhs) const;

  /// Action on a computational basis state: |s> -> phase(s) |s ^ x_mask|>.
  Complex phase_on(std::uint32_t state) const;
  std::uint32_t image_of(std::uint32_t state) const { return state ^ x_mask; }

  bool commutes_with_parity() const;  // even number of bit flips
  Matrix dense() const;
};

PauliString identity_string(int sites);
PauliString sigma_x(int sites, int site);
PauliString sigma_y(int sites, int site);
PauliString sigma_z(int sites, int site);

/// Jordan-Wigner Majorana gamma_a, a in [1, 2L]:
/// gamma_{2j-1} = (prod_{k<j} sigma^z_k) sigma^x_j,
/// gamma_{2j}   = (prod_{k<j} sigma^z_k) sigma^y_j.
PauliString majorana_string(const ChainSpec& spec, int a);
Matrix majorana(const ChainSpec& spec, int a);

/// Terms of H = sum_j [ sum_{k<=4, j+k<=2L} e^{-k+1} (-i gamma_j gamma_{j+k})
///                      + V gamma_j gamma_{j+1} gamma_{j+2} gamma_{j+3} ].
/// The quartic term enters once per j (for j+3 <= 2L).
std::vector<PauliString> hamiltonian_terms(const ChainSpec& spec);
Matrix build_hamiltonian(const ChainSpec& spec);

/// P_Z = prod_j sigma^z_j.
PauliString parity_string(const ChainSpec& spec);
Matrix parity_operator(const ChainSpec& spec);

/// Drive unitaries: X_1 = prod_j sigma^x_j, X_2 = prod_{j<=L/2} sigma^z_{2j}.
/// X_2 requires even L.
PauliString drive_string(const ChainSpec& spec, int which);
std::pair<Matrix, Matrix> build_drive_unitaries(const ChainSpec& spec);

/// Basis of the parity sector: the computational states s (ascending) with
/// (-1)^{popcount(s)} equal to `parity`.
struct SectorBasis {
  int parity = +1;
  std::vector<std::uint32_t> states;
  int dim = 0;

  static SectorBasis build(const ChainSpec& spec, int parity = +1);
};

/// Extract the sector block of a full-space operator. Throws if the operator
/// mixes sectors beyond tolerance.
Matrix project_to_sector(const Matrix& op, const SectorBasis& basis, double tol = 1e-10);

/// Build sum of strings directly in the sector basis (no 2^L intermediate).
Matrix sector_matrix(const std::vector<PauliString>& terms, const SectorBasis& basis);

/// Sector representation of a single Pauli string as a signed permutation:
/// column j goes to row `row[j]` with weight `val[j]`. Used for fast
/// left/right application of the drive operators.
struct SectorOp {
  std::vector<int> row;
  std::vector<Complex> val;

  int dim() const { return static_cast<int>(row.size()); }
  Matrix dense() const;
  Matrix left_apply(const Matrix& u) const;   // this * u
  Matrix right_apply(const Matrix& u) const;  // u * this
  /// Tr(u^dag * this * u * this), the relaxation trace, in O(dim^2).
  Complex relaxation_trace(const Matrix& u) const;
};

SectorOp sector_op(const PauliString& s, const SectorBasis& basis);

/// Split H into A_eps with X_j A_eps X_j = (-1)^{eps_j} A_eps via successive
/// symmetrization over all sign patterns. Keys are the eps vectors.
std::map<std::vector<int>, Matrix> partition_by_parity(const Matrix& h,
                                                       const std::vector<Matrix>& drives);

/// Single spin in the static field B = (1,1,2)/sqrt(6): H = B . sigma.
Matrix single_spin_hamiltonian();

}  // namespace fibdd::spinchain
