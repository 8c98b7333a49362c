#ifndef NASHCONT_GAME_HPP
#define NASHCONT_GAME_HPP

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nashcont {

/// Shape of a finite normal-form game.
///
/// Player i (0-based) has strategies 0..d[i]; strategy 0 is the base strategy
/// against which payoff differences are taken. D = sum of d[i] is the number of
/// free probability coordinates.
class GameFormat {
public:
  GameFormat() = default;

  explicit GameFormat(std::vector<int> d) : d_(std::move(d)) {
    if (d_.size() < 2)
      throw std::invalid_argument("game format needs at least two players");
    for (int di : d_)
      if (di < 1)
        throw std::invalid_argument("every player needs at least two strategies");
  }

  /// Builds a format from strategy counts |S_i| rather than d_i = |S_i| - 1.
  static GameFormat from_strategy_counts(const std::vector<int>& counts) {
    std::vector<int> d;
    d.reserve(counts.size());
    for (int c : counts) d.push_back(c - 1);
    return GameFormat(std::move(d));
  }

  int players() const { return static_cast<int>(d_.size()); }
  int d(int player) const { return d_.at(static_cast<std::size_t>(player)); }
  int strategies(int player) const { return d(player) + 1; }
  const std::vector<int>& ds() const { return d_; }

  int total() const { return std::accumulate(d_.begin(), d_.end(), 0); }

  /// Number of pure strategy profiles, prod (d_i + 1).
  std::size_t outcomes() const {
    std::size_t n = 1;
    for (int di : d_) n *= static_cast<std::size_t>(di + 1);
    return n;
  }

  /// Outcome index j_1 + (d_1+1)(j_2 + (d_2+1)(...)): player 0 varies fastest.
  std::size_t outcome_index(std::span<const int> profile) const {
    if (profile.size() != d_.size())
      throw std::invalid_argument("pure profile has wrong number of players");
    std::size_t idx = 0;
    for (std::size_t k = d_.size(); k-- > 0;) {
      if (profile[k] < 0 || profile[k] > d_[k])
        throw std::out_of_range("pure strategy index out of range");
      idx = idx * static_cast<std::size_t>(d_[k] + 1) + static_cast<std::size_t>(profile[k]);
    }
    return idx;
  }

  std::vector<int> pure_profile(std::size_t outcome) const {
    std::vector<int> s(d_.size());
    for (std::size_t k = 0; k < d_.size(); ++k) {
      const auto base = static_cast<std::size_t>(d_[k] + 1);
      s[k] = static_cast<int>(outcome % base);
      outcome /= base;
    }
    return s;
  }

  std::string to_string() const {
    std::string out = std::to_string(players()) + ":";
    for (std::size_t k = 0; k < d_.size(); ++k) {
      if (k) out += ",";
      out += std::to_string(d_[k] + 1);
    }
    return out;
  }

  friend bool operator==(const GameFormat&, const GameFormat&) = default;

private:
  std::vector<int> d_;
};

/// Position of the coordinate sigma_{player,strategy} among the D free
/// coordinates (0-based; the 1-based n(i,j) = j + sum_{k<i} d_k minus one).
/// Valid strategies are 1..d_player.
inline int flat_index(const GameFormat& format, int player, int strategy) {
  if (player < 0 || player >= format.players())
    throw std::out_of_range("player index out of range");
  if (strategy < 1 || strategy > format.d(player))
    throw std::out_of_range("strategy index must lie in 1..d_i");
  int n = strategy - 1;
  for (int k = 0; k < player; ++k) n += format.d(k);
  return n;
}

/// Inverse of flat_index: (player, strategy) for a coordinate position.
inline std::pair<int, int> flat_coordinate(const GameFormat& format, int index) {
  for (int k = 0; k < format.players(); ++k) {
    if (index < format.d(k)) return {k, index + 1};
    index -= format.d(k);
  }
  throw std::out_of_range("flat index out of range");
}

/// A mixed strategy profile; sigma[i][j] is the probability player i puts on
/// strategy j. Entries are not constrained, so quasi-equilibria fit too.
struct MixedProfile {
  std::vector<std::vector<double>> sigma;

  static MixedProfile pure(const GameFormat& format, std::span<const int> profile) {
    MixedProfile p;
    for (int k = 0; k < format.players(); ++k) {
      std::vector<double> row(static_cast<std::size_t>(format.strategies(k)), 0.0);
      row.at(static_cast<std::size_t>(profile[static_cast<std::size_t>(k)])) = 1.0;
      p.sigma.push_back(std::move(row));
    }
    return p;
  }

  static MixedProfile uniform(const GameFormat& format) {
    MixedProfile p;
    for (int k = 0; k < format.players(); ++k)
      p.sigma.emplace_back(static_cast<std::size_t>(format.strategies(k)),
                           1.0 / format.strategies(k));
    return p;
  }

  bool matches(const GameFormat& format) const {
    if (sigma.size() != static_cast<std::size_t>(format.players())) return false;
    for (int k = 0; k < format.players(); ++k)
      if (sigma[static_cast<std::size_t>(k)].size() != static_cast<std::size_t>(format.strategies(k)))
        return false;
    return true;
  }

  bool normalized(double tol = 1e-9) const {
    for (const auto& row : sigma) {
      double s = 0.0;
      for (double x : row) s += x;
      if (std::abs(s - 1.0) > tol) return false;
    }
    return true;
  }

  double max_distance(const MixedProfile& other) const {
    double m = 0.0;
    for (std::size_t i = 0; i < sigma.size(); ++i)
      for (std::size_t j = 0; j < sigma[i].size(); ++j)
        m = std::max(m, std::abs(sigma[i][j] - other.sigma.at(i).at(j)));
    return m;
  }
};

/// Finite normal-form game with real payoffs u_i(s).
class Game {
public:
  Game() = default;

  /// payoffs[i] lists u_i over all outcomes in outcome_index order.
  Game(GameFormat format, std::vector<std::vector<double>> payoffs)
      : format_(std::move(format)), payoffs_(std::move(payoffs)) {
    if (payoffs_.size() != static_cast<std::size_t>(format_.players()))
      throw std::invalid_argument("payoff table needs one row per player");
    for (const auto& row : payoffs_) {
      if (row.size() != format_.outcomes())
        throw std::invalid_argument("payoff row length must equal the number of outcomes");
      for (double u : row)
        if (!std::isfinite(u)) throw std::invalid_argument("payoffs must be finite");
    }
  }

  const GameFormat& format() const { return format_; }
  const std::vector<std::vector<double>>& payoffs() const { return payoffs_; }

  double payoff(int player, std::size_t outcome) const {
    return payoffs_.at(static_cast<std::size_t>(player)).at(outcome);
  }
  double payoff(int player, std::span<const int> profile) const {
    return payoff(player, format_.outcome_index(profile));
  }

private:
  GameFormat format_;
  std::vector<std::vector<double>> payoffs_;
};

namespace detail {

inline void require_profile(const Game& game, const MixedProfile& profile) {
  if (!profile.matches(game.format()))
    throw std::invalid_argument("mixed profile dimensions do not match the game format");
}

// Sum over outcomes of u_i(s) * prod_k w_k(s_k), where player `fixed` (if >= 0)
// is pinned to strategy `fixed_strategy`.
inline double weighted_payoff(const Game& game, int player, const MixedProfile& profile,
                              int fixed, int fixed_strategy) {
  const GameFormat& f = game.format();
  const int n = f.players();
  std::vector<int> s(static_cast<std::size_t>(n), 0);
  if (fixed >= 0) s[static_cast<std::size_t>(fixed)] = fixed_strategy;
  double total = 0.0;
  for (;;) {
    double w = game.payoff(player, s);
    for (int k = 0; k < n && w != 0.0; ++k)
      if (k != fixed) w *= profile.sigma[static_cast<std::size_t>(k)][static_cast<std::size_t>(s[static_cast<std::size_t>(k)])];
    total += w;
    int k = 0;
    for (; k < n; ++k) {
      if (k == fixed) continue;
      auto& sk = s[static_cast<std::size_t>(k)];
      if (++sk <= f.d(k)) break;
      sk = 0;
    }
    if (k == n) break;
  }
  return total;
}

}  // namespace detail

/// Expected payoff u_i(sigma) = sum_s u_i(s) prod_k sigma_k(s_k).
inline double expected_payoff(const Game& game, int player, const MixedProfile& profile) {
  detail::require_profile(game, profile);
  return detail::weighted_payoff(game, player, profile, -1, 0);
}

/// u_i(s_ij, sigma_{-i}): payoff of pure strategy j against the opponents' mix.
inline double pure_strategy_payoff(const Game& game, int player, int strategy,
                                   const MixedProfile& profile) {
  detail::require_profile(game, profile);
  if (strategy < 0 || strategy > game.format().d(player))
    throw std::out_of_range("strategy index out of range");
  return detail::weighted_payoff(game, player, profile, player, strategy);
}

/// Coefficients u^i_{j_1...j_N} = u_i(..., s_{i j_i}, ...) - u_i(..., s_{i0}, ...).
class PayoffDifferenceTensor {
public:
  explicit PayoffDifferenceTensor(const Game& game) : format_(game.format()) {
    const std::size_t outcomes = format_.outcomes();
    diffs_.resize(static_cast<std::size_t>(format_.players()));
    for (int i = 0; i < format_.players(); ++i) {
      auto& row = diffs_[static_cast<std::size_t>(i)];
      row.resize(outcomes);
      for (std::size_t o = 0; o < outcomes; ++o) {
        auto s = format_.pure_profile(o);
        if (s[static_cast<std::size_t>(i)] == 0) {
          row[o] = 0.0;
          continue;
        }
        const double own = game.payoff(i, o);
        s[static_cast<std::size_t>(i)] = 0;
        row[o] = own - game.payoff(i, s);
      }
    }
  }

  const GameFormat& format() const { return format_; }

  double operator()(int player, std::size_t outcome) const {
    return diffs_.at(static_cast<std::size_t>(player)).at(outcome);
  }
  double operator()(int player, std::span<const int> profile) const {
    return (*this)(player, format_.outcome_index(profile));
  }

private:
  GameFormat format_;
  std::vector<std::vector<double>> diffs_;
};

inline PayoffDifferenceTensor payoff_differences(const Game& game) {
  return PayoffDifferenceTensor(game);
}

}  // namespace nashcont

#endif  // NASHCONT_GAME_HPP
