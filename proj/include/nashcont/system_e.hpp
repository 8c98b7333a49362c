#ifndef NASHCONT_SYSTEM_E_HPP
#define NASHCONT_SYSTEM_E_HPP

#include <algorithm>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nashcont/game.hpp"
#include "nashcont/polynomial.hpp"

namespace nashcont {

/// Per player, the strategies allowed positive probability (P0). Everything
/// else is forced to zero.
struct Support {
  std::vector<std::vector<int>> strategies;

  static Support full(const GameFormat& format) {
    Support s;
    for (int i = 0; i < format.players(); ++i) {
      std::vector<int> all(static_cast<std::size_t>(format.strategies(i)));
      for (int j = 0; j < format.strategies(i); ++j) all[static_cast<std::size_t>(j)] = j;
      s.strategies.push_back(std::move(all));
    }
    return s;
  }

  static Support pure(std::span<const int> profile) {
    Support s;
    for (int j : profile) s.strategies.push_back({j});
    return s;
  }

  /// Full support minus the listed (player, strategy) pairs.
  static Support excluding(const GameFormat& format, const std::vector<std::pair<int, int>>& removed) {
    Support s = full(format);
    for (auto [i, j] : removed) std::erase(s.strategies.at(static_cast<std::size_t>(i)), j);
    return s;
  }

  bool contains(int player, int strategy) const {
    const auto& p = strategies.at(static_cast<std::size_t>(player));
    return std::find(p.begin(), p.end(), strategy) != p.end();
  }

  bool is_full(const GameFormat& format) const {
    for (int i = 0; i < format.players(); ++i)
      if (static_cast<int>(strategies.at(static_cast<std::size_t>(i)).size()) != format.strategies(i)) return false;
    return true;
  }

  /// Throws unless every player keeps a nonempty, sorted, in-range subset.
  void validate(const GameFormat& format) const {
    if (strategies.size() != static_cast<std::size_t>(format.players()))
      throw std::invalid_argument("support must list every player");
    for (int i = 0; i < format.players(); ++i) {
      const auto& p = strategies[static_cast<std::size_t>(i)];
      if (p.empty()) throw std::invalid_argument("support of player " + std::to_string(i + 1) + " is empty");
      for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] < 0 || p[k] > format.d(i)) throw std::invalid_argument("support strategy out of range");
        if (k && p[k] <= p[k - 1]) throw std::invalid_argument("support strategies must be strictly increasing");
      }
    }
  }

  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < strategies.size(); ++i) {
      if (i) out += " | ";
      for (std::size_t k = 0; k < strategies[i].size(); ++k) {
        if (k) out += ",";
        out += std::to_string(strategies[i][k]);
      }
    }
    return out;
  }

  friend bool operator==(const Support&, const Support&) = default;
};

/// Variable bookkeeping for the system E on a support. The smallest strategy
/// in each player's support is the base; the remaining support strategies are
/// the unknowns. Players with a single support strategy are pure.
class SupportLayout {
public:
  struct Variable {
    int player;
    int strategy;
  };

  SupportLayout(const GameFormat& format, Support support) : format_(format), support_(std::move(support)) {
    support_.validate(format_);
    for (int i = 0; i < format_.players(); ++i) {
      const auto& p = support_.strategies[static_cast<std::size_t>(i)];
      if (p.size() >= 2) {
        mixing_.push_back(i);
        reduced_d_.push_back(static_cast<int>(p.size()) - 1);
        for (std::size_t k = 1; k < p.size(); ++k) vars_.push_back({i, p[k]});
      }
    }
  }

  const GameFormat& format() const { return format_; }
  const Support& support() const { return support_; }
  const std::vector<Variable>& variables() const { return vars_; }
  std::size_t nvars() const { return vars_.size(); }

  /// Players whose support has at least two strategies.
  const std::vector<int>& mixing_players() const { return mixing_; }
  /// d'_i for each mixing player, in player order.
  const std::vector<int>& reduced_d() const { return reduced_d_; }

  int base(int player) const { return support_.strategies.at(static_cast<std::size_t>(player)).front(); }

  std::ptrdiff_t variable_index(int player, int strategy) const {
    for (std::size_t v = 0; v < vars_.size(); ++v)
      if (vars_[v].player == player && vars_[v].strategy == strategy) return static_cast<std::ptrdiff_t>(v);
    return -1;
  }

  /// PHC-compatible names (at most five characters).
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& v : vars_) out.push_back(variable_name(v.player, v.strategy));
    return out;
  }

  std::string variable_name(int player, int strategy) const {
    if (player < 9 && strategy <= 9) return "s" + std::to_string(player + 1) + std::to_string(strategy);
    return "x" + std::to_string(flat_index(format_, player, std::max(strategy, 1)) + 1);
  }

  /// Full mixed profile from the unknowns (real parts): base probability is
  /// one minus the other support entries, excluded strategies are zero.
  MixedProfile reconstitute(std::span<const double> x) const {
    if (x.size() != vars_.size()) throw std::invalid_argument("coordinate vector has wrong length");
    MixedProfile p;
    for (int i = 0; i < format_.players(); ++i)
      p.sigma.emplace_back(static_cast<std::size_t>(format_.strategies(i)), 0.0);
    for (std::size_t v = 0; v < vars_.size(); ++v)
      p.sigma[static_cast<std::size_t>(vars_[v].player)][static_cast<std::size_t>(vars_[v].strategy)] = x[v];
    for (int i = 0; i < format_.players(); ++i) {
      auto& row = p.sigma[static_cast<std::size_t>(i)];
      double rest = 0.0;
      for (double s : row) rest += s;
      row[static_cast<std::size_t>(base(i))] = 1.0 - rest;
    }
    return p;
  }

private:
  GameFormat format_;
  Support support_;
  std::vector<Variable> vars_;
  std::vector<int> mixing_;
  std::vector<int> reduced_d_;
};

/// Builds the indifference system E on a support:
///   u_i(s_ij, sigma_{-i}) - u_i(s_ib, sigma_{-i}) = 0
/// for every mixing player i and every non-base support strategy j, with the
/// base probabilities eliminated through sigma_ib = 1 - sum of the others.
/// Pure players enter as constants. Equations are ordered player-major.
inline ComplexSystem build_system_E(const Game& game, const Support& support) {
  const GameFormat& format = game.format();
  SupportLayout layout(format, support);
  const std::size_t n = layout.nvars();

  // Polynomial representing the indicator sigma_{k l} after elimination.
  auto indicator = [&](int k, int l) {
    const auto& p = support.strategies[static_cast<std::size_t>(k)];
    if (p.size() == 1) return ComplexPolynomial::constant(n, 1.0);
    if (l != layout.base(k))
      return ComplexPolynomial::variable(n, static_cast<std::size_t>(layout.variable_index(k, l)));
    ComplexPolynomial base = ComplexPolynomial::constant(n, 1.0);
    for (std::size_t q = 1; q < p.size(); ++q)
      base -= ComplexPolynomial::variable(n, static_cast<std::size_t>(layout.variable_index(k, p[q])));
    return base;
  };

  std::vector<ComplexPolynomial> equations;
  for (int i : layout.mixing_players()) {
    const auto& own = support.strategies[static_cast<std::size_t>(i)];
    const int b = layout.base(i);
    for (std::size_t q = 1; q < own.size(); ++q) {
      const int j = own[q];
      ComplexPolynomial eq(n);
      // Walk all opponent support profiles.
      std::vector<std::size_t> pos(static_cast<std::size_t>(format.players()), 0);
      std::vector<int> s(static_cast<std::size_t>(format.players()), 0);
      for (;;) {
        for (int k = 0; k < format.players(); ++k)
          if (k != i) s[static_cast<std::size_t>(k)] = support.strategies[static_cast<std::size_t>(k)][pos[static_cast<std::size_t>(k)]];
        s[static_cast<std::size_t>(i)] = j;
        const double hi = game.payoff(i, s);
        s[static_cast<std::size_t>(i)] = b;
        const double c = hi - game.payoff(i, s);
        if (c != 0.0) {
          ComplexPolynomial term = ComplexPolynomial::constant(n, c);
          for (int k = 0; k < format.players(); ++k)
            if (k != i) term = term * indicator(k, s[static_cast<std::size_t>(k)]);
          eq += term;
        }
        int k = 0;
        for (; k < format.players(); ++k) {
          if (k == i) continue;
          auto& pk = pos[static_cast<std::size_t>(k)];
          if (++pk < support.strategies[static_cast<std::size_t>(k)].size()) break;
          pk = 0;
        }
        if (k == format.players()) break;
      }
      equations.push_back(std::move(eq));
    }
  }
  return ComplexSystem(layout.names(), std::move(equations));
}

/// Game whose full-support system E is `system`: equation n(i,j) (player-major,
/// variables in flat order) becomes u_i(s_ij, .) evaluated at simplex vertices,
/// with u_i(s_i0, .) = 0. Each monomial may use at most one variable per player
/// and none of the equation owner's; coefficients must be real.
inline Game game_from_system(const GameFormat& format, const ComplexSystem& system) {
  const auto D = static_cast<std::size_t>(format.total());
  if (system.nvars() != D || system.size() != D)
    throw std::invalid_argument("system shape does not match format " + format.to_string());
  std::vector<int> owner;
  for (int k = 0; k < format.players(); ++k)
    for (int l = 0; l < format.d(k); ++l) owner.push_back(k);
  for (std::size_t e = 0; e < D; ++e)
    for (const auto& t : system[e].terms()) {
      if (t.coeff.imag() != 0.0) throw std::invalid_argument("game systems need real coefficients");
      std::vector<int> used(static_cast<std::size_t>(format.players()), 0);
      for (std::size_t v = 0; v < D; ++v) used[static_cast<std::size_t>(owner[v])] += t.mono.exponents[v];
      for (int k = 0; k < format.players(); ++k)
        if (used[static_cast<std::size_t>(k)] > (k == owner[e] ? 0 : 1))
          throw std::invalid_argument("equation " + std::to_string(e + 1) + " is not multilinear in the opponents' blocks");
    }

  std::vector<std::vector<double>> payoffs(static_cast<std::size_t>(format.players()),
                                           std::vector<double>(format.outcomes(), 0.0));
  std::vector<Complex> vertex(D);
  for (std::size_t o = 0; o < format.outcomes(); ++o) {
    const auto s = format.pure_profile(o);
    for (int i = 0; i < format.players(); ++i) {
      const int j = s[static_cast<std::size_t>(i)];
      if (j == 0) continue;
      std::fill(vertex.begin(), vertex.end(), Complex(0.0));
      for (int k = 0; k < format.players(); ++k)
        if (k != i && s[static_cast<std::size_t>(k)] > 0)
          vertex[static_cast<std::size_t>(flat_index(format, k, s[static_cast<std::size_t>(k)]))] = 1.0;
      const auto& eq = system[static_cast<std::size_t>(flat_index(format, i, j))];
      payoffs[static_cast<std::size_t>(i)][o] = eq.evaluate(std::span<const Complex>(vertex)).real();
    }
  }
  return Game(format, std::move(payoffs));
}

}  // namespace nashcont

#endif  // NASHCONT_SYSTEM_E_HPP
