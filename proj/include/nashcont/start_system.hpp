#ifndef NASHCONT_START_SYSTEM_HPP
#define NASHCONT_START_SYSTEM_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nashcont/game.hpp"
#include "nashcont/polynomial.hpp"
#include "nashcont/rational.hpp"
#include "nashcont/system_e.hpp"

namespace nashcont {

// ---------------------------------------------------------------------------
// Totally nonsingular matrices
// ---------------------------------------------------------------------------

/// Injection of the positive integers into the positive rationals used to
/// propose matrix entries.
struct Injection {
  std::string name;
  std::function<Rational(int)> value;

  /// f(k) = 2^(k-1)
  static Injection powers_of_two() {
    return {"pow2", [](int k) {
              Rational q = 1;
              if (k >= 1) mpz_mul_2exp(q.get_num_mpz_t(), q.get_num_mpz_t(), static_cast<mp_bitcnt_t>(k - 1));
              else mpz_mul_2exp(q.get_den_mpz_t(), q.get_den_mpz_t(), static_cast<mp_bitcnt_t>(1 - k));
              q.canonicalize();
              return q;
            }};
  }

  /// f(k) = k + 1, which keeps entries small.
  static Injection linear() {
    return {"linear", [](int k) { return Rational(k + 1); }};
  }

  static Injection by_name(const std::string& name) {
    if (name == "pow2") return powers_of_two();
    if (name == "linear") return linear();
    throw std::invalid_argument("unknown injection '" + name + "' (expected pow2 or linear)");
  }
};

struct TNMatrix {
  RationalMatrix entries;
  std::string source;  // injection name, or "random:<seed>"

  std::size_t rows() const { return entries.size(); }
  std::size_t cols() const { return entries.empty() ? 0 : entries.front().size(); }
  const Rational& operator()(std::size_t r, std::size_t c) const { return entries.at(r).at(c); }
};

namespace detail {

// Calls fn(subset) for every k-subset of {0..n-1} that contains `must`.
template <typename F>
void for_each_subset_with(int n, int k, int must, F&& fn) {
  std::vector<int> others;
  for (int x = 0; x < n; ++x)
    if (x != must) others.push_back(x);
  if (k < 1 || k - 1 > static_cast<int>(others.size())) return;
  std::vector<int> pick(static_cast<std::size_t>(k - 1));
  for (int i = 0; i < k - 1; ++i) pick[static_cast<std::size_t>(i)] = i;
  for (;;) {
    std::vector<int> subset;
    subset.reserve(static_cast<std::size_t>(k));
    for (int p : pick) subset.push_back(others[static_cast<std::size_t>(p)]);
    subset.insert(std::lower_bound(subset.begin(), subset.end(), must), must);
    fn(subset);
    int i = k - 2;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == static_cast<int>(others.size()) - (k - 1) + i) --i;
    if (i < 0) return;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k - 1; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
}

inline RationalMatrix submatrix(const RationalMatrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  RationalMatrix s(rows.size(), std::vector<Rational>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      s[r][c] = m[static_cast<std::size_t>(rows[r])][static_cast<std::size_t>(cols[c])];
  return s;
}

}  // namespace detail

/// Fills a symmetric n x n matrix entry by entry (row i, columns j <= i),
/// proposing f(i+j-1) with 1-based indices, then its negation, then the next
/// injection value, until every fully filled square submatrix through the new
/// entry is nonsingular.
///
/// The determinant of each such submatrix is affine in the new entry, so the
/// forbidden values are collected once per entry as pairs (a, b) with
/// det = a + b * value.
inline TNMatrix build_tn_matrix(int n, const Injection& f = Injection::powers_of_two()) {
  if (n < 1) throw std::invalid_argument("matrix size must be positive");
  RationalMatrix m(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      // Filled region: rows 0..i; columns 0..j when j < i (row i is only
      // filled up to column j), columns 0..i when j == i.
      const int col_limit = j < i ? j + 1 : i + 1;
      std::vector<std::pair<Rational, Rational>> constraints;
      for (int k = 1; k <= std::min(i + 1, col_limit); ++k) {
        detail::for_each_subset_with(i + 1, k, i, [&](const std::vector<int>& rows) {
          detail::for_each_subset_with(col_limit, k, j, [&](const std::vector<int>& cols) {
            auto sub = detail::submatrix(m, rows, cols);
            const auto r = static_cast<std::size_t>(std::find(rows.begin(), rows.end(), i) - rows.begin());
            const auto c = static_cast<std::size_t>(std::find(cols.begin(), cols.end(), j) - cols.begin());
            sub[r][c] = 0;
            Rational a = determinant(sub);
            sub[r][c] = 1;
            Rational b = determinant(sub) - a;
            constraints.emplace_back(std::move(a), std::move(b));
          });
        });
      }
      auto singular = [&](const Rational& v) {
        for (const auto& [a, b] : constraints)
          if (a + b * v == 0) return true;
        return false;
      };
      int idx = i + j + 1;
      Rational v = f.value(idx);
      while (singular(v)) {
        v = -v;
        if (v > 0) v = f.value(++idx);
      }
      m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
      m[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = v;
    }
  }
  return {std::move(m), f.name};
}

/// True iff every square submatrix (any rows x any columns of equal size)
/// has nonzero exact determinant. Cost grows as C(m+n, n).
inline bool is_totally_nonsingular(const RationalMatrix& m) {
  const int rows = static_cast<int>(m.size());
  if (rows == 0) return true;
  const int cols = static_cast<int>(m.front().size());
  for (const auto& r : m)
    if (static_cast<int>(r.size()) != cols) throw std::invalid_argument("ragged matrix");
  for (int k = 1; k <= std::min(rows, cols); ++k) {
    std::vector<int> rsel(static_cast<std::size_t>(k));
    for (std::uint64_t rmask = 0; rmask < (std::uint64_t{1} << rows); ++rmask) {
      if (__builtin_popcountll(rmask) != k) continue;
      rsel.clear();
      for (int r = 0; r < rows; ++r)
        if (rmask >> r & 1) rsel.push_back(r);
      std::vector<int> csel;
      for (std::uint64_t cmask = 0; cmask < (std::uint64_t{1} << cols); ++cmask) {
        if (__builtin_popcountll(cmask) != k) continue;
        csel.clear();
        for (int c = 0; c < cols; ++c)
          if (cmask >> c & 1) csel.push_back(c);
        if (determinant(detail::submatrix(m, rsel, csel)) == 0) return false;
      }
    }
  }
  return true;
}

/// Random symmetric integer matrix; totally nonsingular with probability one.
/// Verified exactly only for n <= 6 (callers must accept the risk above that).
inline TNMatrix random_tn_matrix(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> dist(1, 1L << 20);
  for (;;) {
    RationalMatrix m(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n)));
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        long v = dist(rng);
        if (rng() & 1) v = -v;
        m[i][j] = m[j][i] = Rational(v);
      }
    if (n > 6 || is_totally_nonsingular(m)) return {std::move(m), "random:" + std::to_string(seed)};
  }
}

// ---------------------------------------------------------------------------
// Factored start systems
// ---------------------------------------------------------------------------

/// Affine factor sum_l coeffs[l] * sigma_{player, free[player][l]} + constant.
struct Factor {
  int player = 0;
  std::vector<Rational> coeffs;
  Rational constant = -1;
};

/// Start equation attached to variable (player, strategy): a product of one
/// affine factor per opponent that still has free strategies.
struct StartEquation {
  int player = 0;
  int strategy = 0;
  int row = 0;  // row of the source matrix this equation draws from
  std::vector<Factor> factors;
};

/// Product-of-affine-factors system whose roots are known exactly.
struct FactoredStartSystem {
  GameFormat format;
  TNMatrix matrix;
  /// Per player, strategies (>= 1) that still carry a variable.
  std::vector<std::vector<int>> free;
  std::vector<StartEquation> equations;
  PolySystem<Rational> expanded;

  std::vector<int> block_sizes() const {
    std::vector<int> b;
    for (const auto& f : free) b.push_back(static_cast<int>(f.size()));
    return b;
  }
  std::size_t nvars() const { return equations.size(); }
  const std::vector<std::string>& names() const { return expanded.names(); }

  ComplexSystem complex_system() const {
    return expanded.convert<Complex>([](const Rational& q) { return to_complex(q); });
  }

  /// Exact value of every equation at a rational point, via the factors.
  std::vector<Rational> evaluate_factored(const std::vector<Rational>& x) const {
    if (x.size() != nvars()) throw std::invalid_argument("point has wrong length");
    const auto offsets = block_offsets();
    std::vector<Rational> out;
    for (const auto& eq : equations) {
      Rational prod = 1;
      for (const auto& f : eq.factors) {
        Rational v = f.constant;
        for (std::size_t l = 0; l < f.coeffs.size(); ++l)
          v += f.coeffs[l] * x[offsets[static_cast<std::size_t>(f.player)] + l];
        prod *= v;
      }
      out.push_back(prod);
    }
    return out;
  }

  std::vector<std::size_t> block_offsets() const {
    std::vector<std::size_t> off;
    std::size_t acc = 0;
    for (const auto& f : free) {
      off.push_back(acc);
      acc += f.size();
    }
    return off;
  }
};

namespace detail {

inline std::string start_variable_name(int player, int strategy) {
  if (player < 9 && strategy <= 9) return "s" + std::to_string(player + 1) + std::to_string(strategy);
  return "x" + std::to_string(player + 1) + "_" + std::to_string(strategy);
}

// Equation for variable (i, j) uses matrix row n(i,j) of the full format;
// the factor for opponent k takes columns l-1 for each free strategy l.
inline FactoredStartSystem assemble_start_system(const GameFormat& format, const TNMatrix& m,
                                                 std::vector<std::vector<int>> free) {
  int max_col = 0;
  for (const auto& f : free)
    for (int l : f) max_col = std::max(max_col, l);
  if (m.rows() < static_cast<std::size_t>(format.total()) || m.cols() < static_cast<std::size_t>(max_col))
    throw std::invalid_argument("totally nonsingular matrix is too small for format " + format.to_string());

  FactoredStartSystem s;
  s.format = format;
  s.matrix = m;
  s.free = std::move(free);

  std::vector<std::string> names;
  for (int i = 0; i < format.players(); ++i)
    for (int j : s.free[static_cast<std::size_t>(i)]) names.push_back(start_variable_name(i, j));
  const std::size_t n = names.size();
  const auto offsets = s.block_offsets();

  std::vector<Polynomial<Rational>> polys;
  for (int i = 0; i < format.players(); ++i) {
    for (int j : s.free[static_cast<std::size_t>(i)]) {
      StartEquation eq{i, j, flat_index(format, i, j), {}};
      Polynomial<Rational> poly = Polynomial<Rational>::constant(n, Rational(1));
      for (int k = 0; k < format.players(); ++k) {
        const auto& fk = s.free[static_cast<std::size_t>(k)];
        if (k == i || fk.empty()) continue;
        Factor fac{k, {}, Rational(-1)};
        Polynomial<Rational> lin = Polynomial<Rational>::constant(n, Rational(-1));
        for (std::size_t q = 0; q < fk.size(); ++q) {
          fac.coeffs.push_back(m(static_cast<std::size_t>(eq.row), static_cast<std::size_t>(fk[q] - 1)));
          lin += Polynomial<Rational>::variable(n, offsets[static_cast<std::size_t>(k)] + q, fac.coeffs.back());
        }
        poly = poly * lin;
        eq.factors.push_back(std::move(fac));
      }
      s.equations.push_back(std::move(eq));
      polys.push_back(std::move(poly));
    }
  }
  s.expanded = PolySystem<Rational>(std::move(names), std::move(polys));
  return s;
}

}  // namespace detail

/// Equation n(i,j) = prod_{k != i} (sum_l m_{n(i,j), l} sigma_{kl} - 1).
inline FactoredStartSystem build_start_system(const GameFormat& format, const TNMatrix& m) {
  std::vector<std::vector<int>> free;
  for (int i = 0; i < format.players(); ++i) {
    std::vector<int> f;
    for (int j = 1; j <= format.d(i); ++j) f.push_back(j);
    free.push_back(std::move(f));
  }
  return detail::assemble_start_system(format, m, std::move(free));
}

/// Drops the variables of excluded strategies from every factor and removes
/// their equations. Each player's base strategy 0 must stay in the support.
inline FactoredStartSystem restrict_start_system(const FactoredStartSystem& start, const Support& support) {
  support.validate(start.format);
  std::vector<std::vector<int>> free;
  for (int i = 0; i < start.format.players(); ++i) {
    if (!support.contains(i, 0))
      throw std::invalid_argument("restricting a start system requires every base strategy in the support");
    std::vector<int> f;
    for (int j : start.free[static_cast<std::size_t>(i)])
      if (support.contains(i, j)) f.push_back(j);
    free.push_back(std::move(f));
  }
  return detail::assemble_start_system(start.format, start.matrix, std::move(free));
}

/// 0/1 matrix with P[n(i,j)][n(k,l)] = 1 iff i != k.
inline std::vector<std::vector<int>> incidence_matrix(const std::vector<int>& blocks) {
  std::vector<int> owner;
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (int q = 0; q < blocks[b]; ++q) owner.push_back(static_cast<int>(b));
  std::vector<std::vector<int>> p(owner.size(), std::vector<int>(owner.size(), 0));
  for (std::size_t r = 0; r < owner.size(); ++r)
    for (std::size_t c = 0; c < owner.size(); ++c) p[r][c] = owner[r] != owner[c] ? 1 : 0;
  return p;
}

inline std::vector<std::vector<int>> incidence_matrix(const GameFormat& format) {
  return incidence_matrix(format.ds());
}

/// Which player's block each equation is matched into. The canonical
/// permutation matches the equations a block receives, in increasing order,
/// to that block's columns in increasing order.
struct BlockAssignment {
  std::vector<int> receiver;

  /// For each column (variable) the matched row (equation), 0-based.
  std::vector<int> column_rows(const std::vector<int>& blocks) const {
    std::vector<int> out;
    for (std::size_t b = 0; b < blocks.size(); ++b)
      for (std::size_t e = 0; e < receiver.size(); ++e)
        if (receiver[e] == static_cast<int>(b)) out.push_back(static_cast<int>(e));
    return out;
  }

  /// Quotient of a permutation given as column -> row (0-based).
  static BlockAssignment from_column_rows(const std::vector<int>& blocks, const std::vector<int>& rows) {
    BlockAssignment a;
    a.receiver.assign(rows.size(), -1);
    std::size_t c = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b)
      for (int q = 0; q < blocks[b]; ++q, ++c) {
        const auto r = static_cast<std::size_t>(rows.at(c));
        if (r >= rows.size() || a.receiver[r] != -1) throw std::invalid_argument("not a permutation");
        a.receiver[r] = static_cast<int>(b);
      }
    return a;
  }

  friend bool operator==(const BlockAssignment&, const BlockAssignment&) = default;
};

/// Visits every equation -> block assignment contributing to the permanent of
/// the incidence matrix, once per class modulo within-block column swaps.
template <typename F>
void for_each_assignment(const std::vector<int>& blocks, F&& visit) {
  std::vector<int> owner;
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (int q = 0; q < blocks[b]; ++q) owner.push_back(static_cast<int>(b));
  const std::size_t n = owner.size();
  std::vector<int> capacity(blocks);
  // remaining[b] = equations from row r onward not owned by b; used for pruning.
  BlockAssignment current;
  current.receiver.assign(n, -1);

  std::function<void(std::size_t)> recurse = [&](std::size_t row) {
    if (row == n) {
      visit(static_cast<const BlockAssignment&>(current));
      return;
    }
    // Each block must still be fillable from the rows left that it may take.
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      std::size_t available = 0;
      for (std::size_t r = row; r < n; ++r)
        if (owner[r] != static_cast<int>(b)) ++available;
      if (static_cast<std::size_t>(capacity[b]) > available) return;
    }
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (static_cast<int>(b) == owner[row] || capacity[b] == 0) continue;
      --capacity[b];
      current.receiver[row] = static_cast<int>(b);
      recurse(row + 1);
      current.receiver[row] = -1;
      ++capacity[b];
    }
  };
  recurse(0);
}

inline std::vector<BlockAssignment> enumerate_assignments(const std::vector<int>& blocks) {
  std::vector<BlockAssignment> out;
  for_each_assignment(blocks, [&](const BlockAssignment& a) { out.push_back(a); });
  return out;
}

inline std::vector<BlockAssignment> enumerate_assignments(const GameFormat& format) {
  return enumerate_assignments(format.ds());
}

/// Sets the selected factor of every equation to zero and solves the
/// resulting block-diagonal linear system exactly.
inline std::vector<Rational> solve_start_root(const BlockAssignment& assignment, const FactoredStartSystem& start) {
  if (assignment.receiver.size() != start.equations.size())
    throw std::invalid_argument("assignment does not match the start system");
  std::vector<Rational> x;
  for (std::size_t k = 0; k < start.free.size(); ++k) {
    const std::size_t dk = start.free[k].size();
    if (dk == 0) continue;
    RationalMatrix a;
    std::vector<Rational> b;
    for (std::size_t e = 0; e < start.equations.size(); ++e) {
      if (assignment.receiver[e] != static_cast<int>(k)) continue;
      const auto& facs = start.equations[e].factors;
      auto it = std::find_if(facs.begin(), facs.end(), [&](const Factor& f) { return f.player == static_cast<int>(k); });
      if (it == facs.end()) throw std::invalid_argument("assignment selects a block the equation does not touch");
      a.push_back(it->coeffs);
      b.push_back(-it->constant);
    }
    if (a.size() != dk) throw std::invalid_argument("assignment gives a block the wrong number of equations");
    auto sol = solve_exact(std::move(a), std::move(b));
    if (!sol) throw std::logic_error("singular start subsystem: source matrix is not totally nonsingular");
    x.insert(x.end(), sol->begin(), sol->end());
  }
  return x;
}

/// All roots of a start system, one per assignment.
inline std::vector<std::vector<Rational>> start_roots(const FactoredStartSystem& start) {
  std::vector<std::vector<Rational>> roots;
  for_each_assignment(start.block_sizes(),
                      [&](const BlockAssignment& a) { roots.push_back(solve_start_root(a, start)); });
  return roots;
}

/// Index pairs of coinciding roots; nonempty means the matrix must be re-seeded.
inline std::vector<std::pair<std::size_t, std::size_t>> coinciding_roots(const std::vector<std::vector<Rational>>& roots) {
  std::vector<std::pair<std::size_t, std::size_t>> dup;
  for (std::size_t a = 0; a < roots.size(); ++a)
    for (std::size_t b = a + 1; b < roots.size(); ++b)
      if (roots[a] == roots[b]) dup.emplace_back(a, b);
  return dup;
}

/// Permanent of a 0/1 matrix by Ryser's formula, exact.
inline mpz_class permanent(const std::vector<std::vector<int>>& a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  if (n > 30) throw std::invalid_argument("permanent too large to compute");
  mpz_class total = 0;
  std::vector<long> rowsum(n);
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    std::fill(rowsum.begin(), rowsum.end(), 0);
    for (std::size_t c = 0; c < n; ++c)
      if (mask >> c & 1)
        for (std::size_t r = 0; r < n; ++r) rowsum[r] += a[r][c];
    mpz_class prod = 1;
    for (long s : rowsum) {
      if (s == 0) {
        prod = 0;
        break;
      }
      prod *= s;
    }
    if ((n - static_cast<std::size_t>(__builtin_popcountll(mask))) % 2) total -= prod;
    else total += prod;
  }
  return total;
}

/// Generic number of roots of E: perm(P) / prod d_i!.
inline mpz_class bernstein_number(const std::vector<int>& blocks) {
  mpz_class denom = 1;
  for (int d : blocks)
    for (int q = 2; q <= d; ++q) denom *= q;
  const mpz_class perm = permanent(incidence_matrix(blocks));
  return perm / denom;
}

inline mpz_class bernstein_number(const GameFormat& format) { return bernstein_number(format.ds()); }

/// Game whose indifference system E is exactly the (unrestricted) start
/// system: u_i(s_i0, .) = 0 and u_i(s_ij, s_-i) = prod_{k != i} mu_k(s_k),
/// where mu_k(0) is the factor's constant and mu_k(l) = coeff_l + constant.
inline Game start_game(const FactoredStartSystem& start) {
  const GameFormat& f = start.format;
  for (int i = 0; i < f.players(); ++i)
    if (static_cast<int>(start.free[static_cast<std::size_t>(i)].size()) != f.d(i))
      throw std::invalid_argument("start_game needs an unrestricted start system");
  std::vector<std::vector<double>> payoffs(static_cast<std::size_t>(f.players()), std::vector<double>(f.outcomes(), 0.0));
  for (std::size_t o = 0; o < f.outcomes(); ++o) {
    const auto s = f.pure_profile(o);
    for (int i = 0; i < f.players(); ++i) {
      const int j = s[static_cast<std::size_t>(i)];
      if (j == 0) continue;
      const auto& eq = start.equations[static_cast<std::size_t>(flat_index(f, i, j))];
      Rational u = 1;
      for (const auto& fac : eq.factors) {
        const int l = s[static_cast<std::size_t>(fac.player)];
        u *= l == 0 ? fac.constant : fac.coeffs[static_cast<std::size_t>(l - 1)] + fac.constant;
      }
      payoffs[static_cast<std::size_t>(i)][o] = u.get_d();
    }
  }
  return Game(f, std::move(payoffs));
}

}  // namespace nashcont

#endif  // NASHCONT_START_SYSTEM_HPP
