#include "fibdd/spinchain.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace fibdd::spinchain {

namespace {

// Site j (1-based) lives in bit (L - j): site 1 is the most significant bit.
std::uint32_t site_bit(int sites, int site) { return 1u << (sites - site); }

}  // namespace

void ChainSpec::validate() const {
  if (length < 1) throw std::invalid_argument("ChainSpec: length must be >= 1");
  if (length > 20) throw std::invalid_argument("ChainSpec: length too large for dense simulation");
}

PauliString PauliString::operator*(const PauliString& rhs) const {
  if (sites != rhs.sites) throw std::invalid_argument("PauliString: size mismatch");
  PauliString out;
  out.sites = sites;
  out.x_mask = x_mask ^ rhs.x_mask;
  out.z_mask = z_mask ^ rhs.z_mask;
  // Reordering Z^{z} X^{x'} costs (-1)^{|z & x'|}.
  const int swaps = std::popcount(z_mask & rhs.x_mask);
  out.coeff = coeff * rhs.coeff * ((swaps & 1) ? -1.0 : 1.0);
  return out;
}

Complex PauliString::phase_on(std::uint32_t state) const {
  const int z_hits = std::popcount(z_mask & state);
  return (z_hits & 1) ? -coeff : coeff;
}

bool PauliString::commutes_with_parity() const { return (std::popcount(x_mask) & 1) == 0; }

Matrix PauliString::dense() const {
  const int dim = 1 << sites;
  Matrix m = Matrix::Zero(dim, dim);
  for (std::uint32_t s = 0; s < static_cast<std::uint32_t>(dim); ++s)
    m(image_of(s), s) = phase_on(s);
  return m;
}

PauliString identity_string(int sites) {
  PauliString p;
  p.sites = sites;
  return p;
}

PauliString sigma_x(int sites, int site) {
  PauliString p = identity_string(sites);
  p.x_mask = site_bit(sites, site);
  return p;
}

PauliString sigma_z(int sites, int site) {
  PauliString p = identity_string(sites);
  p.z_mask = site_bit(sites, site);
  return p;
}

PauliString sigma_y(int sites, int site) {
  // sigma^y = i X Z
  PauliString p = identity_string(sites);
  p.x_mask = site_bit(sites, site);
  p.z_mask = site_bit(sites, site);
  p.coeff = imag_unit;
  return p;
}

PauliString majorana_string(const ChainSpec& spec, int a) {
  spec.validate();
  if (a < 1 || a > 2 * spec.length)
    throw std::out_of_range("majorana: index must be in [1, 2L]");
  const int j = (a + 1) / 2;
  PauliString p = identity_string(spec.length);
  for (int k = 1; k < j; ++k) p = p * sigma_z(spec.length, k);
  p = p * ((a % 2 == 1) ? sigma_x(spec.length, j) : sigma_y(spec.length, j));
  return p;
}

Matrix majorana(const ChainSpec& spec, int a) { return majorana_string(spec, a).dense(); }

std::vector<PauliString> hamiltonian_terms(const ChainSpec& spec) {
  spec.validate();
  const int n = 2 * spec.length;
  std::vector<PauliString> terms;
  PauliString minus_i = identity_string(spec.length);
  minus_i.coeff = -imag_unit;
  for (int j = 1; j <= n; ++j) {
    for (int k = 1; k <= 4; ++k) {
      if (j + k > n) continue;
      PauliString t = minus_i * majorana_string(spec, j) * majorana_string(spec, j + k);
      t.coeff *= std::exp(double(-k + 1));
      terms.push_back(t);
    }
    if (j + 3 <= n && spec.quartic != 0.0) {
      PauliString q = majorana_string(spec, j) * majorana_string(spec, j + 1) *
                      majorana_string(spec, j + 2) * majorana_string(spec, j + 3);
      q.coeff *= spec.quartic;
      terms.push_back(q);
    }
  }
  return terms;
}

Matrix build_hamiltonian(const ChainSpec& spec) {
  const int dim = spec.hilbert_dim();
  Matrix h = Matrix::Zero(dim, dim);
  for (const auto& t : hamiltonian_terms(spec))
    for (std::uint32_t s = 0; s < static_cast<std::uint32_t>(dim); ++s)
      h(t.image_of(s), s) += t.phase_on(s);
  return h;
}

PauliString parity_string(const ChainSpec& spec) {
  PauliString p = identity_string(spec.length);
  for (int j = 1; j <= spec.length; ++j) p = p * sigma_z(spec.length, j);
  return p;
}

Matrix parity_operator(const ChainSpec& spec) {
  spec.validate();
  return parity_string(spec).dense();
}

PauliString drive_string(const ChainSpec& spec, int which) {
  spec.validate();
  PauliString p = identity_string(spec.length);
  if (which == 1) {
    for (int j = 1; j <= spec.length; ++j) p = p * sigma_x(spec.length, j);
  } else if (which == 2) {
    if (spec.length % 2 != 0)
      throw std::invalid_argument("drive X_2 requires an even chain length");
    for (int j = 1; j <= spec.length / 2; ++j) p = p * sigma_z(spec.length, 2 * j);
  } else {
    throw std::out_of_range("drive_string: only X_1 and X_2 are defined");
  }
  return p;
}

std::pair<Matrix, Matrix> build_drive_unitaries(const ChainSpec& spec) {
  return {drive_string(spec, 1).dense(), drive_string(spec, 2).dense()};
}

SectorBasis SectorBasis::build(const ChainSpec& spec, int parity) {
  spec.validate();
  if (parity != 1 && parity != -1) throw std::invalid_argument("sector parity must be +-1");
  SectorBasis b;
  b.parity = parity;
  const std::uint32_t dim = 1u << spec.length;
  for (std::uint32_t s = 0; s < dim; ++s) {
    const int eig = (std::popcount(s) & 1) ? -1 : +1;
    if (eig == parity) b.states.push_back(s);
  }
  b.dim = static_cast<int>(b.states.size());
  return b;
}

Matrix project_to_sector(const Matrix& op, const SectorBasis& basis, double tol) {
  const int full = static_cast<int>(op.rows());
  if (op.cols() != full) throw std::invalid_argument("project_to_sector: operator not square");

  // P_Z is diagonal, so commuting with it means no matrix elements between
  // states of opposite popcount parity.
  double mixing = 0.0;
  for (int c = 0; c < full; ++c) {
    const int pc = std::popcount(static_cast<std::uint32_t>(c)) & 1;
    for (int r = 0; r < full; ++r) {
      if ((std::popcount(static_cast<std::uint32_t>(r)) & 1) != pc)
        mixing = std::max(mixing, std::abs(op(r, c)));
    }
  }
  if (mixing > tol)
    throw std::invalid_argument("project_to_sector: operator mixes parity sectors");

  Matrix out(basis.dim, basis.dim);
  for (int c = 0; c < basis.dim; ++c)
    for (int r = 0; r < basis.dim; ++r) out(r, c) = op(basis.states[r], basis.states[c]);
  return out;
}

namespace {

std::vector<int> sector_index_map(const SectorBasis& basis) {
  std::uint32_t top = 0;
  for (auto s : basis.states) top = std::max(top, s);
  std::vector<int> index(top + 1, -1);
  for (int i = 0; i < basis.dim; ++i) index[basis.states[i]] = i;
  return index;
}

}  // namespace

Matrix sector_matrix(const std::vector<PauliString>& terms, const SectorBasis& basis) {
  Matrix m = Matrix::Zero(basis.dim, basis.dim);
  const auto index = sector_index_map(basis);
  for (const auto& t : terms) {
    if (!t.commutes_with_parity())
      throw std::invalid_argument("sector_matrix: term does not preserve the parity sector");
    for (int c = 0; c < basis.dim; ++c) {
      const std::uint32_t s = basis.states[c];
      const std::uint32_t img = t.image_of(s);
      const int r = (img < index.size()) ? index[img] : -1;
      if (r < 0) throw std::logic_error("sector_matrix: image left the sector");
      m(r, c) += t.phase_on(s);
    }
  }
  return m;
}

Matrix SectorOp::dense() const {
  const int d = dim();
  Matrix m = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) m(row[j], j) = val[j];
  return m;
}

Matrix SectorOp::left_apply(const Matrix& u) const {
  Matrix out(u.rows(), u.cols());
  for (int j = 0; j < dim(); ++j) out.row(row[j]) = val[j] * u.row(j);
  return out;
}

Matrix SectorOp::right_apply(const Matrix& u) const {
  Matrix out(u.rows(), u.cols());
  for (int j = 0; j < dim(); ++j) out.col(j) = val[j] * u.col(row[j]);
  return out;
}

Complex SectorOp::relaxation_trace(const Matrix& u) const {
  // Tr(u^dag X u X) with X a signed permutation: X u X has entries
  // val[i] val[j] u(row[i], row[j]) at (i, j).
  Complex tr = 0.0;
  const int d = dim();
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i)
      tr += std::conj(u(i, j)) * val[i] * val[j] * u(row[i], row[j]);
  return tr;
}

SectorOp sector_op(const PauliString& s, const SectorBasis& basis) {
  // Membership of every image in the basis is the operative check; it also
  // covers parity-sector preservation when the basis is a true sector.
  const auto index = sector_index_map(basis);
  SectorOp op;
  op.row.resize(basis.dim);
  op.val.resize(basis.dim);
  for (int j = 0; j < basis.dim; ++j) {
    const std::uint32_t img = s.image_of(basis.states[j]);
    const int r = (img < index.size()) ? index[img] : -1;
    if (r < 0)
      throw std::invalid_argument("sector_op: operator does not preserve the basis span");
    op.row[j] = r;
    op.val[j] = s.phase_on(basis.states[j]);
  }
  return op;
}

std::map<std::vector<int>, Matrix> partition_by_parity(const Matrix& h,
                                                       const std::vector<Matrix>& drives) {
  const int n = static_cast<int>(drives.size());
  std::map<std::vector<int>, Matrix> parts;
  for (int pattern = 0; pattern < (1 << n); ++pattern) {
    std::vector<int> eps(n);
    for (int i = 0; i < n; ++i) eps[i] = (pattern >> i) & 1;
    Matrix a = h;
    // Successive symmetrization: A_eps = prod_i (1 + (-1)^{eps_i} ad_{X_i}) / 2.
    for (int i = 0; i < n; ++i) {
      const double sign = eps[i] ? -1.0 : 1.0;
      a = 0.5 * (a + sign * drives[i] * a * drives[i]);
    }
    parts.emplace(std::move(eps), std::move(a));
  }
  return parts;
}

Matrix single_spin_hamiltonian() {
  const double s = 1.0 / std::sqrt(6.0);
  Matrix h(2, 2);
  // B . sigma with B = (1, 1, 2)/sqrt(6)
  h(0, 0) = 2.0 * s;
  h(1, 1) = -2.0 * s;
  h(0, 1) = Complex(s, -s);
  h(1, 0) = Complex(s, s);
  return h;
}

}  // namespace fibdd::spinchain
