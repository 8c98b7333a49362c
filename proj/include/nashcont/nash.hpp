#ifndef NASHCONT_NASH_HPP
#define NASHCONT_NASH_HPP

#include <algorithm>
#include <climits>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nashcont/game.hpp"
#include "nashcont/homotopy.hpp"
#include "nashcont/start_library.hpp"
#include "nashcont/start_system.hpp"
#include "nashcont/system_e.hpp"

namespace nashcont {

/// v_ij = u_i(sigma) - u_i(s_ij, sigma_-i) for every player and strategy.
struct SlackVector {
  std::vector<std::vector<double>> v;

  double min() const {
    double m = INFINITY;
    for (const auto& row : v)
      for (double x : row) m = std::min(m, x);
    return m;
  }
};

inline SlackVector slack_vector(const Game& game, const MixedProfile& profile) {
  SlackVector s;
  for (int i = 0; i < game.format().players(); ++i) {
    const double total = expected_payoff(game, i, profile);
    std::vector<double> row;
    for (int j = 0; j < game.format().strategies(i); ++j)
      row.push_back(total - pure_strategy_payoff(game, i, j, profile));
    s.v.push_back(std::move(row));
  }
  return s;
}

struct EquilibriumCheck {
  bool is_nash = false;
  SlackVector slack;
};

/// Nash test on a profile: sigma_ij >= -tol, sums 1 +- tol, v_ij >= -tol and
/// |sigma_ij v_ij| <= tol everywhere.
inline EquilibriumCheck check_equilibrium(const Game& game, const MixedProfile& profile, double tol = 1e-7) {
  EquilibriumCheck c{true, slack_vector(game, profile)};
  for (std::size_t i = 0; i < profile.sigma.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < profile.sigma[i].size(); ++j) {
      const double s = profile.sigma[i][j], v = c.slack.v[i][j];
      sum += s;
      if (s < -tol || v < -tol || std::abs(s * v) > tol) c.is_nash = false;
    }
    if (std::abs(sum - 1.0) > tol) c.is_nash = false;
  }
  return c;
}

enum class Classification { nash, quasi, complex, rejected_slack, rejected_negative };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::nash: return "nash";
    case Classification::quasi: return "quasi";
    case Classification::complex: return "complex";
    case Classification::rejected_slack: return "rejected_slack";
    case Classification::rejected_negative: return "rejected_negative";
  }
  return "?";
}

struct EquilibriumCandidate {
  MixedProfile profile;
  Support support;
  SlackVector slack;
  Classification classification = Classification::complex;
  int path = -1;                  // index of the tracked path, -1 for direct checks
  std::vector<Complex> endpoint;  // raw solver coordinates
  double residual = 0.0;
};

/// Pure profiles where every player's strategy is a strictly better response
/// than each alternative.
inline std::vector<std::vector<int>> find_pure_strict(const Game& game) {
  const GameFormat& f = game.format();
  std::vector<std::vector<int>> out;
  for (std::size_t o = 0; o < f.outcomes(); ++o) {
    auto s = f.pure_profile(o);
    bool strict = true;
    for (int i = 0; i < f.players() && strict; ++i) {
      const int own = s[static_cast<std::size_t>(i)];
      const double u = game.payoff(i, o);
      for (int l = 0; l <= f.d(i) && strict; ++l) {
        if (l == own) continue;
        s[static_cast<std::size_t>(i)] = l;
        if (!(u > game.payoff(i, s))) strict = false;
        s[static_cast<std::size_t>(i)] = own;
      }
    }
    if (strict) out.push_back(s);
  }
  return out;
}

enum class SupportMode {
  all,            // every support
  generic,        // skip supports with exactly one mixing player
  totally_mixed,  // the full support only
};

struct SupportOptions {
  SupportMode mode = SupportMode::all;
  int min_size = 1;        // per-player support size bounds
  int max_size = INT_MAX;
};

/// Calls fn(support) for each support allowed by the options, in a fixed order
/// (player 0's subset varies fastest, subsets in bitmask order).
template <typename F>
void for_each_support(const GameFormat& format, const SupportOptions& options, F&& fn) {
  if (options.mode == SupportMode::totally_mixed) {
    fn(Support::full(format));
    return;
  }
  const int n = format.players();
  std::vector<unsigned long> mask(static_cast<std::size_t>(n), 1);
  for (int i = 0; i < n; ++i)
    if (format.strategies(i) > 63) throw std::invalid_argument("too many strategies for support enumeration");
  for (;;) {
    bool ok = true;
    int mixing = 0;
    for (int i = 0; i < n && ok; ++i) {
      const int size = __builtin_popcountl(mask[static_cast<std::size_t>(i)]);
      if (size < options.min_size || size > options.max_size) ok = false;
      if (size >= 2) ++mixing;
    }
    if (ok && !(options.mode == SupportMode::generic && mixing == 1)) {
      Support s;
      for (int i = 0; i < n; ++i) {
        std::vector<int> p;
        for (int j = 0; j < format.strategies(i); ++j)
          if (mask[static_cast<std::size_t>(i)] >> j & 1) p.push_back(j);
        s.strategies.push_back(std::move(p));
      }
      fn(s);
    }
    int i = 0;
    for (; i < n; ++i) {
      auto& m = mask[static_cast<std::size_t>(i)];
      if (++m < (1ul << format.strategies(i))) break;
      m = 1;
    }
    if (i == n) return;
  }
}

inline std::vector<Support> enumerate_supports(const GameFormat& format, const SupportOptions& options = {}) {
  std::vector<Support> out;
  for_each_support(format, options, [&](const Support& s) { out.push_back(s); });
  return out;
}

enum class StartMethod {
  start_library,  // start system of the reduced format, from the cache
  direct,         // restrict the full-format start system and solve it on the spot
};

struct SolveOptions {
  SupportOptions supports;
  StartMethod method = StartMethod::start_library;
  HomotopyConfig homotopy = HomotopyConfig::with_seed(0);
  unsigned workers = 1;
  double real_tol = 1e-6;     // |Im| <= real_tol * max(1, |Re|)
  double residual_tol = 1e-6; // E at the real part, relative to 1 + |x|
  double slack_tol = 1e-7;
  double dedup_radius = 1e-6;
};

struct SupportResult {
  std::vector<EquilibriumCandidate> candidates;
  std::vector<std::string> warnings;
};

namespace detail {

inline Classification classify(const Game& game, const SupportLayout& layout, EquilibriumCandidate& c, double tol) {
  for (const auto& v : layout.variables())
    if (c.profile.sigma[static_cast<std::size_t>(v.player)][static_cast<std::size_t>(v.strategy)] < -tol)
      return Classification::quasi;
  for (const auto& row : c.profile.sigma)
    for (double s : row)
      if (s < -tol || s > 1.0 + tol) return Classification::rejected_negative;
  auto check = check_equilibrium(game, c.profile, tol);
  c.slack = check.slack;
  return check.is_nash ? Classification::nash : Classification::rejected_slack;
}

inline bool is_real(const CVector& x, double tol) {
  for (Eigen::Index q = 0; q < x.size(); ++q)
    if (std::abs(x[q].imag()) > tol * std::max(1.0, std::abs(x[q].real()))) return false;
  return true;
}

// Start system and its roots for the mixing players of a support, with
// equations aligned to build_system_E.
inline std::pair<ComplexSystem, std::vector<CVector>> support_start(const SupportLayout& layout, StartLibrary& library,
                                                                    StartMethod method) {
  bool base_zero = true;
  for (int i = 0; i < layout.format().players(); ++i) base_zero = base_zero && layout.base(i) == 0;
  std::vector<CVector> roots;
  if (method == StartMethod::direct && base_zero) {
    const auto full = library.get(layout.format());
    const auto restricted = restrict_start_system(full->system, layout.support());
    for (const auto& r : start_roots(restricted)) roots.push_back(to_cvector(to_complex(r)));
    return {restricted.complex_system(), std::move(roots)};
  }
  const auto entry = library.get(GameFormat(layout.reduced_d()));
  for (const auto& r : entry->roots) roots.push_back(to_cvector(to_complex(r)));
  return {entry->system.complex_system(), std::move(roots)};
}

}  // namespace detail

/// Candidates for the totally mixed equilibria of the game restricted to a
/// support: solve E by continuation from a start system, keep real endpoints,
/// rebuild the full profile and classify it.
inline SupportResult solve_support(const Game& game, const Support& support, StartLibrary& library,
                                   const SolveOptions& options = {}) {
  SupportLayout layout(game.format(), support);
  SupportResult out;
  const std::string where = "support " + support.to_string() + ": ";

  auto finish = [&](EquilibriumCandidate c) {
    c.support = support;
    if (c.classification != Classification::complex)
      c.classification = detail::classify(game, layout, c, options.slack_tol);
    else
      c.slack = slack_vector(game, c.profile);
    out.candidates.push_back(std::move(c));
  };

  if (layout.mixing_players().empty()) {
    EquilibriumCandidate c;
    c.profile = layout.reconstitute({});
    c.classification = Classification::nash;
    finish(std::move(c));
    return out;
  }

  const ComplexSystem e = build_system_E(game, support);
  if (layout.mixing_players().size() == 1) {
    // Opponents are pure, so every equation is a constant.
    const std::vector<Complex> origin(layout.nvars(), Complex(0.0));
    bool all_zero = true;
    for (const auto& v : evaluate(e, origin)) all_zero = all_zero && std::abs(v) <= 1e-12;
    if (all_zero)
      out.warnings.push_back(where + "indifference holds identically (positive-dimensional set, not enumerated)");
    return out;
  }

  auto [start, roots] = detail::support_start(layout, library, options.method);
  const CompiledSystem q(start), p(e);
  const auto paths = track_all(q, p, roots, options.homotopy, options.workers);
  for (std::size_t k = 0; k < paths.size(); ++k) {
    const auto& r = paths[k];
    if (r.status != PathStatus::converged) {
      out.warnings.push_back(where + "path " + std::to_string(k + 1) + " " + to_string(r.status) +
                             (r.message.empty() ? "" : " (" + r.message + ")"));
      continue;
    }
    EquilibriumCandidate c;
    c.path = static_cast<int>(k);
    c.endpoint = to_std(r.endpoint);
    c.residual = r.residual;
    std::vector<double> re(static_cast<std::size_t>(r.endpoint.size()));
    for (std::size_t q2 = 0; q2 < re.size(); ++q2) re[q2] = r.endpoint[static_cast<Eigen::Index>(q2)].real();
    c.profile = layout.reconstitute(re);
    c.classification = Classification::quasi;  // placeholder, resolved in finish
    if (!detail::is_real(r.endpoint, options.real_tol)) {
      c.classification = Classification::complex;
    } else {
      const CVector xr = r.endpoint.real().cast<Complex>();
      const double res = detail::max_norm(p.value(xr));
      if (res > options.residual_tol * (1.0 + detail::max_norm(xr))) c.classification = Classification::complex;
      else c.residual = res;
    }
    finish(std::move(c));
  }
  return out;
}

enum class TwoByTwoKind { solved, inconsistent, indeterminate };

struct TwoByTwoCoordinate {
  TwoByTwoKind kind = TwoByTwoKind::indeterminate;
  double value = 0.0;
};

struct TwoByTwoResult {
  TwoByTwoCoordinate sigma11;  // from player 2's indifference
  TwoByTwoCoordinate sigma21;  // from player 1's indifference

  bool totally_mixed() const {
    return sigma11.kind == TwoByTwoKind::solved && sigma21.kind == TwoByTwoKind::solved;
  }
};

/// Closed form for two players with two strategies each; u1[j1][j2] and
/// u2[j1][j2] are payoffs (or payoff differences) at (s_1j1, s_2j2):
///   (u1_11 - u1_10 - u1_01 + u1_00) sigma_21 = u1_00 - u1_10
///   (u2_11 - u2_01 - u2_10 + u2_00) sigma_11 = u2_00 - u2_01
inline TwoByTwoResult solve_2x2_reduced(const double (&u1)[2][2], const double (&u2)[2][2]) {
  auto solve = [](double den, double num) {
    if (den != 0.0) return TwoByTwoCoordinate{TwoByTwoKind::solved, num / den};
    return TwoByTwoCoordinate{num == 0.0 ? TwoByTwoKind::indeterminate : TwoByTwoKind::inconsistent, 0.0};
  };
  return {solve(u2[1][1] - u2[0][1] - u2[1][0] + u2[0][0], u2[0][0] - u2[0][1]),
          solve(u1[1][1] - u1[1][0] - u1[0][1] + u1[0][0], u1[0][0] - u1[1][0])};
}

struct NashResult {
  std::vector<EquilibriumCandidate> equilibria;  // nash only, deduplicated
  std::vector<EquilibriumCandidate> candidates;  // everything examined
  std::vector<std::string> warnings;
};

/// Pure strict equilibria plus the candidates of every enumerated support,
/// with equilibria merged when closer than the dedup radius.
inline NashResult find_all_nash(const Game& game, StartLibrary& library, const SolveOptions& options = {}) {
  NashResult out;
  auto add = [&](EquilibriumCandidate c) {
    if (c.classification == Classification::nash) {
      const bool seen = std::any_of(out.equilibria.begin(), out.equilibria.end(), [&](const EquilibriumCandidate& e) {
        return e.profile.max_distance(c.profile) <= options.dedup_radius;
      });
      if (!seen) out.equilibria.push_back(c);
    }
    out.candidates.push_back(std::move(c));
  };
  for (const auto& s : find_pure_strict(game)) {
    EquilibriumCandidate c;
    c.profile = MixedProfile::pure(game.format(), s);
    c.support = Support::pure(s);
    c.slack = slack_vector(game, c.profile);
    c.classification = Classification::nash;
    add(std::move(c));
  }
  for_each_support(game.format(), options.supports, [&](const Support& s) {
    auto r = solve_support(game, s, library, options);
    for (auto& c : r.candidates) add(std::move(c));
    out.warnings.insert(out.warnings.end(), r.warnings.begin(), r.warnings.end());
  });
  return out;
}

inline NashResult find_all_nash(const Game& game, const SolveOptions& options = {}) {
  StartLibrary library = StartLibrary::from_environment();
  return find_all_nash(game, library, options);
}

}  // namespace nashcont

#endif  // NASHCONT_NASH_HPP
