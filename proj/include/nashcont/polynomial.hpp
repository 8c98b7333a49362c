#ifndef NASHCONT_POLYNOMIAL_HPP
#define NASHCONT_POLYNOMIAL_HPP

#include <algorithm>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace nashcont {

using Complex = std::complex<double>;

/// Dense exponent vector over a fixed number of variables.
struct Monomial {
  std::vector<int> exponents;

  Monomial() = default;
  explicit Monomial(std::size_t nvars) : exponents(nvars, 0) {}
  explicit Monomial(std::vector<int> e) : exponents(std::move(e)) {}

  static Monomial variable(std::size_t nvars, std::size_t var) {
    Monomial m(nvars);
    m.exponents.at(var) = 1;
    return m;
  }

  std::size_t nvars() const { return exponents.size(); }

  int degree() const {
    int d = 0;
    for (int e : exponents) d += e;
    return d;
  }

  bool is_constant() const { return degree() == 0; }

  Monomial operator*(const Monomial& o) const {
    Monomial r(*this);
    for (std::size_t i = 0; i < exponents.size(); ++i) r.exponents[i] += o.exponents.at(i);
    return r;
  }

  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Canonical term order: ascending total degree, then descending lex on the
/// exponent vector (so x1 comes before x2, x1*x3 before x2*x3).
inline bool canonical_less(const Monomial& a, const Monomial& b) {
  const int da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  return std::lexicographical_compare(b.exponents.begin(), b.exponents.end(),
                                      a.exponents.begin(), a.exponents.end());
}

template <typename C>
struct Term {
  C coeff;
  Monomial mono;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Sparse polynomial; terms are kept canonical (sorted, merged, nonzero).
template <typename C>
class Polynomial {
public:
  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

  Polynomial(std::size_t nvars, std::vector<Term<C>> terms) : nvars_(nvars), terms_(std::move(terms)) {
    for (const auto& t : terms_)
      if (t.mono.nvars() != nvars_) throw std::invalid_argument("monomial arity mismatch");
    canonicalize();
  }

  static Polynomial constant(std::size_t nvars, C c) {
    return Polynomial(nvars, {Term<C>{std::move(c), Monomial(nvars)}});
  }
  static Polynomial variable(std::size_t nvars, std::size_t var, C c = C(1)) {
    return Polynomial(nvars, {Term<C>{std::move(c), Monomial::variable(nvars, var)}});
  }

  std::size_t nvars() const { return nvars_; }
  const std::vector<Term<C>>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Coefficient of a monomial (zero if absent).
  C coefficient(const Monomial& m) const {
    for (const auto& t : terms_)
      if (t.mono == m) return t.coeff;
    return C(0);
  }

  int degree_in(std::size_t var) const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, t.mono.exponents.at(var));
    return d;
  }

  bool mentions(std::size_t var) const { return degree_in(var) > 0; }

  Polynomial& operator+=(const Polynomial& o) {
    require_same(o);
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    canonicalize();
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) { return *this += o * C(-1); }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.require_same(b);
    std::vector<Term<C>> out;
    out.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& x : a.terms_)
      for (const auto& y : b.terms_) out.push_back(Term<C>{x.coeff * y.coeff, x.mono * y.mono});
    return Polynomial(a.nvars_, std::move(out));
  }

  friend Polynomial operator*(Polynomial a, const C& c) {
    for (auto& t : a.terms_) t.coeff = t.coeff * c;
    a.canonicalize();
    return a;
  }

  /// Value at a point; T must be constructible from C.
  template <typename T>
  T evaluate(std::span<const T> point) const {
    if (point.size() != nvars_) throw std::invalid_argument("evaluation point has wrong length");
    T sum(0);
    for (const auto& t : terms_) {
      T v = T(t.coeff);
      for (std::size_t i = 0; i < nvars_; ++i)
        for (int e = 0; e < t.mono.exponents[i]; ++e) v *= point[i];
      sum += v;
    }
    return sum;
  }

  Polynomial derivative(std::size_t var) const {
    std::vector<Term<C>> out;
    for (const auto& t : terms_) {
      const int e = t.mono.exponents.at(var);
      if (e == 0) continue;
      Term<C> d{t.coeff * C(e), t.mono};
      d.mono.exponents[var] -= 1;
      out.push_back(std::move(d));
    }
    return Polynomial(nvars_, std::move(out));
  }

  /// Coefficient-wise conversion, e.g. exact rationals to complex doubles.
  template <typename D, typename F>
  Polynomial<D> convert(F&& fn) const {
    std::vector<Term<D>> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) out.push_back(Term<D>{fn(t.coeff), t.mono});
    return Polynomial<D>(nvars_, std::move(out));
  }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
  void require_same(const Polynomial& o) const {
    if (o.nvars_ != nvars_) throw std::invalid_argument("polynomials over different variable sets");
  }

  void canonicalize() {
    std::stable_sort(terms_.begin(), terms_.end(),
                     [](const Term<C>& a, const Term<C>& b) { return canonical_less(a.mono, b.mono); });
    std::vector<Term<C>> merged;
    merged.reserve(terms_.size());
    for (auto& t : terms_) {
      if (!merged.empty() && merged.back().mono == t.mono)
        merged.back().coeff = merged.back().coeff + t.coeff;
      else
        merged.push_back(std::move(t));
    }
    std::erase_if(merged, [](const Term<C>& t) { return t.coeff == C(0); });
    terms_ = std::move(merged);
  }

  std::size_t nvars_ = 0;
  std::vector<Term<C>> terms_;
};

/// A list of polynomial equations over named variables.
template <typename C>
class PolySystem {
public:
  PolySystem() = default;

  PolySystem(std::vector<std::string> names, std::vector<Polynomial<C>> equations)
      : names_(std::move(names)), equations_(std::move(equations)) {
    std::unordered_set<std::string> seen;
    for (const auto& n : names_)
      if (n.empty() || !seen.insert(n).second)
        throw std::invalid_argument("variable names must be nonempty and unique: '" + n + "'");
    for (const auto& e : equations_)
      if (e.nvars() != names_.size())
        throw std::invalid_argument("equation arity does not match variable count");
  }

  std::size_t nvars() const { return names_.size(); }
  std::size_t size() const { return equations_.size(); }
  bool square() const { return size() == nvars(); }

  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Polynomial<C>>& equations() const { return equations_; }
  const Polynomial<C>& operator[](std::size_t i) const { return equations_.at(i); }

  std::ptrdiff_t index_of(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    return it == names_.end() ? -1 : it - names_.begin();
  }

  template <typename D, typename F>
  PolySystem<D> convert(F&& fn) const {
    std::vector<Polynomial<D>> eqs;
    eqs.reserve(equations_.size());
    for (const auto& e : equations_) eqs.push_back(e.template convert<D>(fn));
    return PolySystem<D>(names_, std::move(eqs));
  }

  /// Same system with variables permuted into the order given by `names`.
  PolySystem reorder_variables(const std::vector<std::string>& names) const {
    if (names.size() != names_.size()) throw std::invalid_argument("variable sets differ in size");
    std::vector<std::size_t> from(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
      auto idx = index_of(names[i]);
      if (idx < 0) throw std::invalid_argument("unknown variable '" + names[i] + "'");
      from[i] = static_cast<std::size_t>(idx);
    }
    std::vector<Polynomial<C>> eqs;
    for (const auto& e : equations_) {
      std::vector<Term<C>> terms;
      for (const auto& t : e.terms()) {
        Monomial m(names.size());
        for (std::size_t i = 0; i < names.size(); ++i) m.exponents[i] = t.mono.exponents[from[i]];
        terms.push_back(Term<C>{t.coeff, std::move(m)});
      }
      eqs.emplace_back(names.size(), std::move(terms));
    }
    return PolySystem(names, std::move(eqs));
  }

  PolySystem reversed_equations() const {
    return PolySystem(names_, std::vector<Polynomial<C>>(equations_.rbegin(), equations_.rend()));
  }

  friend bool operator==(const PolySystem&, const PolySystem&) = default;

private:
  std::vector<std::string> names_;
  std::vector<Polynomial<C>> equations_;
};

using ComplexPolynomial = Polynomial<Complex>;
using ComplexSystem = PolySystem<Complex>;

/// Component-wise evaluation of every equation.
template <typename C, typename T>
std::vector<T> evaluate(const PolySystem<C>& system, std::span<const T> point) {
  if (point.size() != system.nvars())
    throw std::invalid_argument("point length " + std::to_string(point.size()) +
                                " does not match " + std::to_string(system.nvars()) + " variables");
  std::vector<T> out;
  out.reserve(system.size());
  for (const auto& eq : system.equations()) out.push_back(eq.evaluate(point));
  return out;
}

template <typename C, typename T>
std::vector<T> evaluate(const PolySystem<C>& system, const std::vector<T>& point) {
  return evaluate(system, std::span<const T>(point));
}

/// Row-major matrix of partial derivatives at a point; rows are equations.
template <typename C, typename T>
std::vector<std::vector<T>> jacobian(const PolySystem<C>& system, std::span<const T> point) {
  if (!system.square()) throw std::invalid_argument("jacobian requires a square system");
  if (point.size() != system.nvars()) throw std::invalid_argument("point length does not match system");
  const std::size_t n = system.nvars();
  std::vector<std::vector<T>> jac(system.size(), std::vector<T>(n, T(0)));
  for (std::size_t r = 0; r < system.size(); ++r) {
    for (const auto& t : system[r].terms()) {
      for (std::size_t v = 0; v < n; ++v) {
        const int e = t.mono.exponents[v];
        if (e == 0) continue;
        T val = T(t.coeff) * T(e);
        for (std::size_t w = 0; w < n; ++w) {
          const int ew = w == v ? e - 1 : t.mono.exponents[w];
          for (int k = 0; k < ew; ++k) val *= point[w];
        }
        jac[r][v] += val;
      }
    }
  }
  return jac;
}

template <typename C, typename T>
std::vector<std::vector<T>> jacobian(const PolySystem<C>& system, const std::vector<T>& point) {
  return jacobian(system, std::span<const T>(point));
}

/// Equality up to a permutation of the variable order (names must match as sets).
template <typename C>
bool same_up_to_variable_order(const PolySystem<C>& a, const PolySystem<C>& b) {
  if (a.nvars() != b.nvars() || a.size() != b.size()) return false;
  for (const auto& n : a.names())
    if (b.index_of(n) < 0) return false;
  return a == b.reorder_variables(a.names());
}

}  // namespace nashcont

#endif  // NASHCONT_POLYNOMIAL_HPP
