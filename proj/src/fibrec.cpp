#include "fibdd/fibrec.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fibdd::fibrec {

long long fibonacci(int n) {
  if (n < -1 || n > 90) throw std::out_of_range("fibonacci: n must be in [-1, 90]");
  if (n == -1) return 1;
  long long a = 0, b = 1;  // F_0, F_1
  for (int k = 0; k < n; ++k) {
    const long long next = a + b;
    a = b;
    b = next;
  }
  return a;
}

std::vector<std::int8_t> fib_word(int depth) {
  if (depth < 1) throw std::invalid_argument("fib_word: depth must be >= 1");
  if (depth == 1) return {-1};
  std::vector<std::int8_t> prev = {-1};  // word(1)
  std::vector<std::int8_t> cur = {+1};   // word(2)
  for (int n = 3; n <= depth; ++n) {
    std::vector<std::int8_t> next = cur;
    next.insert(next.end(), prev.begin(), prev.end());
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

std::vector<std::int8_t> fib_word_prefix(long long length) {
  if (length < 0) throw std::invalid_argument("fib_word_prefix: negative length");
  std::vector<std::int8_t> prev = {+1};      // word(2)
  std::vector<std::int8_t> cur = {+1, -1};   // word(3)
  while (static_cast<long long>(cur.size()) < length) {
    std::vector<std::int8_t> next = cur;
    next.insert(next.end(), prev.begin(), prev.end());
    prev = std::move(cur);
    cur = std::move(next);
  }
  cur.resize(length);
  return cur;
}

int location(long long period, long long completed, long long offset) {
  if (period < 1 || (period & (period - 1)) != 0)
    throw std::invalid_argument("location: period must be a positive power of two");
  const long long r = (((completed - offset) % period) + period) % period;
  return static_cast<int>(period - r);
}

int RecursionPlan::conjugate_of(int cat, long long depth_n) const {
  const long long m = depth_n - 1;
  return conjugate[cat][static_cast<int>(m % cycle_length)];
}

std::vector<std::pair<int, int>> RecursionPlan::drive_layer_pairs() const {
  std::vector<std::pair<int, int>> pairs;
  for (int j = 1; j <= num_layers; ++j)
    for (int i = 1; i <= num_drives; ++i) pairs.emplace_back(i, j);
  return pairs;
}

std::uint8_t shifted_boundary_mask(const drive::ProtocolSpec& proto, long long shift,
                                   long long r) {
  return drive::ideal_boundary_mask(proto, shift + r);
}

namespace {

long long pisano_period(long long modulus) {
  if (modulus == 1) return 1;
  long long a = 1 % modulus, b = 1 % modulus;  // F_1, F_2
  for (long long p = 1;; ++p) {
    const long long next = (a + b) % modulus;
    a = b;
    b = next;
    if (a == 1 % modulus && b == 1 % modulus) return p;
    if (p > 6 * modulus) throw std::logic_error("pisano_period: no period found");
  }
}

/// Reduced drive masks of a window of F_depth boundaries shifted by `shift`.
std::vector<std::uint8_t> placement_word(const drive::ProtocolSpec& proto, int depth,
                                         long long shift) {
  const long long len = fibonacci(depth);
  std::vector<std::uint8_t> word(len);
  for (long long r = 1; r <= len; ++r)
    word[r - 1] = drive::ideal_boundary_mask(proto, shift + r);
  return word;
}

}  // namespace

RecursionPlan derive_plan(int num_drives, int num_layers, int validate_depth) {
  drive::ProtocolSpec proto;
  proto.num_drives = num_drives;
  proto.num_layers = num_layers;
  proto.base_period = 1.0;
  proto.validate();
  if (validate_depth < 5 || validate_depth > 40)
    throw std::invalid_argument("derive_plan: validate_depth out of range");

  RecursionPlan plan;
  plan.num_drives = num_drives;
  plan.num_layers = num_layers;
  const int product = num_drives * num_layers;
  plan.longest_period = 1ll << (product - 1);
  plan.cycle_length = static_cast<int>(pisano_period(plan.longest_period));
  if (product >= 2 && plan.cycle_length != 3 * (1 << (product - 2)))
    throw std::logic_error("derive_plan: cycle length disagrees with 3 * 2^{ns nf - 2}");

  const long long pmax = plan.longest_period;
  // Residues of F_m mod pmax for m = 0 .. cycle_length-1 (periodic in m).
  std::vector<long long> fib_mod(plan.cycle_length);
  for (int m = 0; m < plan.cycle_length; ++m) fib_mod[m] = fibonacci(m) % pmax;
  const auto fib_residue = [&](long long m) { return fib_mod[m % plan.cycle_length]; };

  // Discover the categories: breadth-first closure of shift classes under
  // sigma -> sigma + F_m, starting from the physical sequence (sigma = 0).
  std::vector<int> class_of(pmax, -1);
  std::vector<int> discovered;
  discovered.push_back(0);
  class_of[0] = 0;
  for (std::size_t head = 0; head < discovered.size(); ++head) {
    const long long sigma = discovered[head];
    for (int m = 2; m < 2 + plan.cycle_length; ++m) {
      const long long next = (sigma + fib_residue(m)) % pmax;
      if (class_of[next] < 0) {
        class_of[next] = static_cast<int>(discovered.size());
        discovered.push_back(static_cast<int>(next));
      }
    }
  }
  plan.category_count = static_cast<int>(discovered.size());
  if (plan.category_count != (1 << (product - 1)))
    throw std::logic_error("derive_plan: category count disagrees with 2^{ns nf - 1}");

  const auto pairs = plan.drive_layer_pairs();
  for (int c = 0; c < plan.category_count; ++c) {
    RecursionPlan::Category cat;
    cat.shift_class = discovered[c];
    cat.name = std::string(1, static_cast<char>('A' + c));
    for (auto [i, j] : pairs) {
      const long long p = proto.boundary_period(i, j);
      const long long offset = ((-(long long)cat.shift_class) % p + p) % p;
      cat.offsets.push_back(static_cast<int>(offset));
      cat.first_positions.push_back(static_cast<int>((offset + p - 1) % p + 1));
    }
    cat.seed_ops = shifted_boundary_mask(proto, cat.shift_class, 1);
    plan.categories.push_back(std::move(cat));
  }

  // No two categories may share a k-vector.
  {
    std::set<std::vector<int>> seen;
    for (const auto& cat : plan.categories)
      if (!seen.insert(cat.offsets).second)
        throw std::logic_error("derive_plan: duplicate k-vector across categories");
  }

  plan.conjugate.assign(plan.category_count, std::vector<int>(plan.cycle_length, -1));
  for (int c = 0; c < plan.category_count; ++c) {
    for (int rho = 0; rho < plan.cycle_length; ++rho) {
      // Representative m >= 2 with m = rho (mod cycle_length).
      const long long m = rho + ((rho < 2) ? plan.cycle_length : 0);
      const long long target = (plan.categories[c].shift_class + fib_residue(m)) % pmax;
      plan.conjugate[c][rho] = class_of[target];
    }
  }

  // Brute-force validation against explicit operator-placement words: the
  // tail of every depth-n word must equal the conjugate category's depth
  // (n-2) word, for every category and 3 <= n <= validate_depth.
  {
    std::vector<std::vector<std::vector<std::uint8_t>>> words(plan.category_count);
    for (int c = 0; c < plan.category_count; ++c) {
      words[c].resize(validate_depth + 1);
      for (int n = 1; n <= validate_depth; ++n)
        words[c][n] = placement_word(proto, n, plan.categories[c].shift_class);
    }
    for (int n = 3; n <= validate_depth; ++n) {
      const long long head = fibonacci(n - 1);
      for (int c = 0; c < plan.category_count; ++c) {
        const auto& whole = words[c][n];
        const auto& front = words[c][n - 1];
        if (!std::equal(front.begin(), front.end(), whole.begin()))
          throw std::logic_error("derive_plan: depth word does not start with its right factor");
        const int conj = plan.conjugate_of(c, n);
        const auto& tail = words[conj][n - 2];
        if (!std::equal(tail.begin(), tail.end(), whole.begin() + head))
          throw std::logic_error("derive_plan: brute-force word disagrees with category table");
      }
    }
    // At full validation depth the words distinguish every category, so the
    // table's choice is the unique consistent one.
    const int n = validate_depth;
    const long long head = fibonacci(n - 1);
    for (int c = 0; c < plan.category_count; ++c) {
      const auto& whole = words[c][n];
      int matches = 0;
      for (int other = 0; other < plan.category_count; ++other) {
        const auto& tail = words[other][n - 2];
        if (std::equal(tail.begin(), tail.end(), whole.begin() + head)) ++matches;
      }
      if (matches != 1)
        throw std::logic_error("derive_plan: conjugate category is not uniquely determined");
    }
  }

  // Cross-check: the location equation, evaluated with the right factor's
  // k-vector, must reproduce the conjugate category's first positions.
  for (int c = 0; c < plan.category_count; ++c) {
    for (int rho = 0; rho < plan.cycle_length; ++rho) {
      const long long m = rho + ((rho < 2) ? plan.cycle_length : 0);
      const auto& conj = plan.categories[plan.conjugate[c][rho]];
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        const long long period = proto.boundary_period(pairs[p].first, pairs[p].second);
        const int predicted =
            location(period, fibonacci(static_cast<int>(m)), plan.categories[c].offsets[p]);
        if (predicted != conj.first_positions[p])
          throw std::logic_error("derive_plan: location equation disagrees with brute force");
      }
    }
  }

  return plan;
}

std::string RecursionPlan::table_string(int cat) const {
  drive::ProtocolSpec proto;
  proto.num_drives = num_drives;
  proto.num_layers = num_layers;
  proto.base_period = 1.0;

  std::ostringstream os;
  os << "category " << categories[cat].name << " (n_s=" << num_drives << ", n_f=" << num_layers
     << "), conjugate of the right factor at depth m:\n";
  os << "m (mod " << cycle_length << ")";
  for (int m = 2; m < 2 + cycle_length; ++m) os << "\t" << m;
  os << "\n";
  const auto pairs = drive_layer_pairs();
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    os << "L_{" << pairs[p].first << "," << pairs[p].second << "}";
    for (int m = 2; m < 2 + cycle_length; ++m) {
      const long long period = proto.boundary_period(pairs[p].first, pairs[p].second);
      os << "\t" << location(period, fibonacci(m), categories[cat].offsets[p]);
    }
    os << "\n";
  }
  os << "conjugate";
  for (int m = 2; m < 2 + cycle_length; ++m)
    os << "\t" << categories[conjugate[cat][m % cycle_length]].name;
  os << "\n";
  return os.str();
}

std::vector<std::pair<Matrix, Matrix>> make_seeds(const RecursionPlan& plan,
                                                  const Matrix& u_minus, const Matrix& u_plus,
                                                  const std::vector<Matrix>& drives) {
  if (static_cast<int>(drives.size()) != plan.num_drives)
    throw std::invalid_argument("make_seeds: wrong number of drive operators");
  std::vector<std::pair<Matrix, Matrix>> seeds;
  seeds.reserve(plan.category_count);
  for (const auto& cat : plan.categories) {
    Matrix first = u_minus;
    Matrix second = u_plus;
    for (int i = 1; i <= plan.num_drives; ++i) {
      if (cat.seed_ops & (1u << (i - 1))) {
        first = drives[i - 1] * first;
        second = drives[i - 1] * second;
      }
    }
    seeds.emplace_back(std::move(first), std::move(second));
  }
  return seeds;
}

void recursive_evolve(const RecursionPlan& plan, std::vector<std::pair<Matrix, Matrix>> seeds,
                      int max_depth, const std::vector<int>& record_depths,
                      const DepthSink& sink, evolve::UnitarityGuard* guard) {
  if (static_cast<int>(seeds.size()) != plan.category_count)
    throw std::invalid_argument("recursive_evolve: one seed pair per category required");
  if (max_depth < 2) throw std::invalid_argument("recursive_evolve: max_depth must be >= 2");

  const auto should_record = [&](int n) {
    return record_depths.empty() ||
           std::find(record_depths.begin(), record_depths.end(), n) != record_depths.end();
  };

  std::vector<Matrix> prev2, prev1;
  prev2.reserve(plan.category_count);
  prev1.reserve(plan.category_count);
  for (auto& s : seeds) {
    prev2.push_back(std::move(s.first));
    prev1.push_back(std::move(s.second));
  }

  if (should_record(2)) sink(2, fibonacci(2), prev1[0]);

  std::vector<Matrix> next(plan.category_count);
  for (int n = 3; n <= max_depth; ++n) {
    for (int c = 0; c < plan.category_count; ++c)
      next[c] = prev2[plan.conjugate_of(c, n)] * prev1[c];
    if (guard)
      for (auto& u : next) guard->maintain(u);
    if (should_record(n)) sink(n, fibonacci(n), next[0]);
    std::swap(prev2, prev1);
    std::swap(prev1, next);
  }
}

Matrix oracle_unitary(const drive::ProtocolSpec& proto, int depth, const Matrix& u_plus,
                      const Matrix& u_minus, const std::vector<Matrix>& drives,
                      long long shift) {
  const auto word = fib_word(depth);
  Matrix u = Matrix::Identity(u_plus.rows(), u_plus.cols());
  for (long long r = 1; r <= static_cast<long long>(word.size()); ++r) {
    u = (word[r - 1] > 0 ? u_plus : u_minus) * u;
    const std::uint8_t mask = shifted_boundary_mask(proto, shift, r);
    for (int i = 1; i <= proto.num_drives; ++i)
      if (mask & (1u << (i - 1))) u = drives[i - 1] * u;
  }
  return u;
}

double elapsed_time(int depth, double t_plus, double t_minus) {
  return double(fibonacci(depth - 1)) * t_plus + double(fibonacci(depth - 2)) * t_minus;
}

}  // namespace fibdd::fibrec
