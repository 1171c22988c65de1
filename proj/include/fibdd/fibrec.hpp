#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fibdd/drive.hpp"
#include "fibdd/types.hpp"
#include "fibdd/unitarity.hpp"

namespace fibdd::fibrec {

/// F_n with F_1 = F_2 = 1 (extended by F_0 = 0, F_{-1} = 1). n <= 90.
long long fibonacci(int n);

/// Fibonacci word at depth n, earliest letter first: word(1) = [-],
/// word(2) = [+], word(n) = word(n-1) ++ word(n-2). Letters are +-1 and
/// select the long/short interval. word(n) is a prefix of word(n+1) for
/// n >= 2, so these are windows of one infinite duration sequence.
std::vector<std::int8_t> fib_word(int depth);

/// First `length` letters of the infinite word (the n -> inf limit).
std::vector<std::int8_t> fib_word_prefix(long long length);

/// Position, within a conjugate factor, of the first application of a drive
/// of period P (a power of two), after `completed` periods have elapsed in
/// the right factor and the right factor's own grid is offset by k:
/// P - ((completed - k) mod P), in [1, P].
int location(long long period, long long completed, long long offset);

/// The recursion U_n = U*_{n-2} U_{n-1} closes on K decorated variants
/// ("categories") of each depth's unitary. A category is a residue class of
/// the window shift modulo the longest drive period; its k-vector records
/// where each drive's application grid falls inside the window.
struct RecursionPlan {
  int num_drives = 1;
  int num_layers = 1;
  int category_count = 1;       // K = 2^{ns nf - 1}
  int cycle_length = 1;         // ell; conjugate choices repeat with this period
  long long longest_period = 1;  // 2^{ns nf - 1}

  struct Category {
    std::string name;                  // "A" is the physical sequence
    int shift_class = 0;               // window shift mod longest_period
    std::vector<int> offsets;          // per (i,j): application grid offset in [0, P_ij)
    std::vector<int> first_positions;  // per (i,j): first application in [1, P_ij]
    std::uint8_t seed_ops = 0;         // reduced drive mask at the window's first boundary
  };
  std::vector<Category> categories;  // categories[0] is A

  /// conjugate[cat][(n-1) mod cycle_length] = category of U*_{n-2} when
  /// building U_n^{cat}. Column labels follow the right factor's subscript.
  std::vector<std::vector<int>> conjugate;

  int conjugate_of(int cat, long long depth_n) const;

  /// Pairs (i, j) in the fixed order used by offsets / first_positions.
  std::vector<std::pair<int, int>> drive_layer_pairs() const;

  /// Human-readable category table (location rows plus conjugate row) for
  /// one category, in the same shape as the reference tables.
  std::string table_string(int cat) const;
};

/// Build the plan from first principles: enumerate the categories by brute
/// force over explicit operator-placement words up to depth `validate_depth`,
/// check K and the cycle length, and cross-check every table entry against
/// the location equation. Throws std::logic_error if the two constructions
/// ever disagree.
RecursionPlan derive_plan(int num_drives, int num_layers, int validate_depth = 20);

/// Reduced drive mask at boundary r (r >= 1) of a window shifted by `shift`.
std::uint8_t shifted_boundary_mask(const drive::ProtocolSpec& proto, long long shift,
                                   long long r);

/// Seed unitaries per category: U_1 = D_c U_minus, U_2 = D_c U_plus, where
/// D_c applies the drives named by the category's first-boundary mask
/// (highest drive index leftmost).
std::vector<std::pair<Matrix, Matrix>> make_seeds(const RecursionPlan& plan,
                                                  const Matrix& u_minus, const Matrix& u_plus,
                                                  const std::vector<Matrix>& drives);

using DepthSink = std::function<void(int depth, long long boundaries, const Matrix& unitary)>;

/// Run U_n^c = U_{n-2}^{conj(c,n)} U_{n-1}^c for all K categories up to
/// max_depth, invoking the sink with the physical (category A) unitary at
/// every depth >= 2 contained in record_depths (all of them when empty).
/// Cost per depth is K dense multiplications; only two depths are retained.
void recursive_evolve(const RecursionPlan& plan, std::vector<std::pair<Matrix, Matrix>> seeds,
                      int max_depth, const std::vector<int>& record_depths,
                      const DepthSink& sink, evolve::UnitarityGuard* guard = nullptr);

/// Ground truth for the recursion: walk the depth-n word in time order,
/// alternating interval propagators and boundary drives. Cost F_n
/// multiplications; use only for validation at moderate depth.
Matrix oracle_unitary(const drive::ProtocolSpec& proto, int depth, const Matrix& u_plus,
                      const Matrix& u_minus, const std::vector<Matrix>& drives,
                      long long shift = 0);

/// Physical time spanned by the depth-n unitary.
double elapsed_time(int depth, double t_plus, double t_minus);

}  // namespace fibdd::fibrec
