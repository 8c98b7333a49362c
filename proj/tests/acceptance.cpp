// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "nashcont/nashcont.hpp"
#include "oracles.hpp"

using namespace nashcont;

namespace {

// Pinned tolerances and time limits.
constexpr double kCoordTol5 = 1e-6;
constexpr double kResidualTol5 = 1e-10;
constexpr double kConjugateTol5 = 1e-8;
constexpr double kResidualTol6 = 1e-12;
constexpr double kPayoffTol7 = 1e-9;
constexpr double kValueTol8 = 1e-7;
constexpr double kCheckTol8 = 1e-7;
constexpr double kOddShare8 = 0.95;
constexpr double kLimit1 = 1.0, kLimit2 = 1.0, kLimit4 = 1.0, kLimit5 = 10.0, kLimit6 = 1.0, kLimit8 = 120.0;

const std::vector<std::string> kNames{"s11", "s12", "s21", "s22", "s31", "s32"};

struct Outcome {
  bool pass;
  std::string detail;
};

RationalMatrix ints(const std::vector<std::vector<long>>& rows) {
  RationalMatrix m;
  for (const auto& r : rows) {
    std::vector<Rational> row;
    for (long x : r) row.emplace_back(x);
    m.push_back(row);
  }
  return m;
}

std::vector<Rational> q(std::initializer_list<const char*> xs) {
  std::vector<Rational> v;
  for (const char* x : xs) v.push_back(parse_rational(x));
  return v;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Outcome criterion1() {
  const auto want = ints({{1, 2, 4, 8, 16, 32},
                          {2, -4, 16, -32, 128, -256},
                          {4, 16, -16, -128, 1024, -256},
                          {8, -32, -128, -64, 4096, 4096},
                          {16, 128, 1024, 4096, -256, 1024},
                          {32, -256, -256, 4096, 1024, -1024}});
  const auto m = build_tn_matrix(6);
  int mismatches = 0;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) mismatches += m.entries[i][j] != want[i][j];
  return {mismatches == 0, std::to_string(36 - mismatches) + "/36 entries exact"};
}

Outcome criterion2() {
  const std::vector<std::vector<Rational>> table{
      q({"3/64", "1/512", "3/4", "1/8", "3/16", "1/64"}),       q({"7/32", "3/128", "21/16", "-5/32", "5/12", "-1/24"}),
      q({"17/96", "7/384", "21/16", "-5/32", "7/8", "3/16"}),   q({"5/48", "-1/192", "129/160", "31/320", "5/12", "-1/24"}),
      q({"7/16", "-3/64", "129/160", "31/320", "7/8", "3/16"}), q({"7/32", "3/128", "33/80", "-7/160", "7/4", "-3/8"}),
      q({"17/96", "7/384", "33/80", "-7/160", "17/24", "7/48"}), q({"5/48", "-1/192", "21/32", "5/64", "7/4", "-3/8"}),
      q({"7/16", "-3/64", "21/32", "5/64", "17/24", "7/48"}),   q({"3/16", "1/64", "3/64", "1/512", "3/4", "1/8"})};
  const GameFormat f({2, 2, 2});
  const auto start = build_start_system(f, build_tn_matrix(6));
  const auto assignments = enumerate_assignments(f);
  std::vector<std::vector<Rational>> got;
  for (const auto& a : assignments) got.push_back(solve_start_root(a, start));
  int matched = 0;
  for (const auto& row : table) matched += std::find(got.begin(), got.end(), row) != got.end();
  bool exact_zero = true;
  for (const auto& r : got)
    for (const auto& v : evaluate(start.expanded, r)) exact_zero = exact_zero && v == 0;
  return {assignments.size() == 10 && matched == 10 && exact_zero,
          std::to_string(assignments.size()) + " assignments, " + std::to_string(matched) + "/10 table roots exact"};
}

Outcome criterion3() {
  const auto start = build_start_system(GameFormat({1, 1, 1}), build_tn_matrix(3));
  auto roots = start_roots(start);
  std::sort(roots.begin(), roots.end());
  const std::vector<std::vector<Rational>> want{q({"1/4", "1", "1/2"}), q({"1/2", "1/4", "1"})};
  return {roots == want, std::to_string(roots.size()) + " roots, exact match " + (roots == want ? "yes" : "no")};
}

Outcome criterion4() {
  std::string d;
  bool ok = true;
  for (const auto& [counts, want, want_perm] : std::vector<std::tuple<std::vector<int>, long, long>>{
           {{2, 2, 2}, 2, 2}, {{3, 3, 3}, 10, 80}}) {
    const auto f = GameFormat::from_strategy_counts(counts);
    long fact = 1;
    for (int x : f.ds())
      for (int k = 2; k <= x; ++k) fact *= k;
    const auto b = bernstein_number(f);
    const long perm = oracle::brute_force_permanent(incidence_matrix(f));
    ok = ok && b == want && perm == want_perm && perm % fact == 0 && b == perm / fact;
    d += (d.empty() ? "" : ", ") + f.to_string() + ": " + b.get_str() + " = " + std::to_string(perm) + "/" +
         std::to_string(fact);
  }
  return {ok, d};
}

Outcome criterion5() {
  const auto start = build_start_system(GameFormat({2, 2, 2}), build_tn_matrix(6));
  std::vector<CVector> roots;
  for (const auto& r : start_roots(start)) roots.push_back(to_cvector(to_complex(r)));
  const auto target =
      read_system(oracle::data("target_3x3x3.phc")).reversed_equations().reorder_variables(kNames);
  const auto paths = track_all(start.complex_system(), target, roots, HomotopyConfig::with_seed(0));

  int converged = 0;
  double worst = 0.0;
  for (const auto& r : paths) {
    converged += r.status == PathStatus::converged;
    worst = std::max(worst, r.residual);
  }
  const std::vector<double> sol3{1.27522488578381,  0.745738698011832,  -0.104186142941727,
                                 -1.12076297688423, -0.509803187724616, 0.444045922481355};
  auto near = [&](const CVector& x) {
    for (std::size_t k = 0; k < 6; ++k)
      if (std::abs(x[static_cast<Eigen::Index>(k)] - sol3[k]) > kCoordTol5) return false;
    return true;
  };
  std::size_t hit = paths.size();
  for (std::size_t k = 0; k < paths.size(); ++k)
    if (near(paths[k].endpoint)) hit = k;
  // The rest pairs up under complex conjugation.
  std::vector<bool> used(paths.size(), false);
  if (hit < paths.size()) used[hit] = true;
  bool closed = hit < paths.size();
  for (std::size_t a = 0; a < paths.size() && closed; ++a) {
    if (used[a]) continue;
    const CVector c = paths[a].endpoint.conjugate();
    bool found = false;
    for (std::size_t b = 0; b < paths.size() && !found; ++b) {
      if (used[b]) continue;
      if (b == a && paths[a].endpoint.imag().cwiseAbs().maxCoeff() > kConjugateTol5) continue;
      if ((paths[b].endpoint - c).cwiseAbs().maxCoeff() <= kConjugateTol5) found = used[a] = used[b] = true;
    }
    closed = found;
  }
  return {converged == 10 && hit < paths.size() && closed && worst <= kResidualTol5,
          std::to_string(converged) + "/10 converged, real solution " + (hit < paths.size() ? "found" : "missing") +
              ", conjugate-closed " + (closed ? "yes" : "no") + ", max residual " + fmt("%.2e", worst)};
}

Outcome criterion6() {
  const auto target = read_system(oracle::data("target_3x3x3.phc"));
  const auto reports = validate_solutions(target, read_solutions(oracle::data("target_3x3x3.real_roots")));
  bool ok = reports.size() == 2;
  std::string d;
  for (const auto& r : reports) {
    ok = ok && r.residual <= kResidualTol6;
    d += (d.empty() ? "" : ", ") + fmt("%.2e", r.residual);
  }
  return {ok, "residuals " + d};
}

Outcome criterion7() {
  const GameFormat f({2, 2, 2});
  const Game g = start_game(build_start_system(f, build_tn_matrix(6)));
  const Support s = Support::excluding(f, {{2, 1}});
  const SupportLayout layout(f, s);
  EquilibriumCandidate c;
  c.profile = layout.reconstitute(std::vector<double>{17.0 / 96, 7.0 / 384, 3.0 / 4, 1.0 / 8, 1.0 / 32});
  const auto cls = detail::classify(g, layout, c, 1e-7);
  const double better = pure_strategy_payoff(g, 2, 1, c.profile);
  return {cls == Classification::rejected_slack && std::abs(better - 112.5) <= kPayoffTol7,
          std::string(to_string(cls)) + ", payoff of excluded strategy " + fmt("%.12g", better) + " (225/2 = 112.5)"};
}

Game bimatrix(const double (&a)[2][2], const double (&b)[2][2]) {
  const GameFormat f({1, 1});
  std::vector<double> u0(4), u1(4);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      const auto o = f.outcome_index(std::vector<int>{r, c});
      u0[o] = a[r][c];
      u1[o] = b[r][c];
    }
  return Game(f, {u0, u1});
}

Outcome criterion8() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  StartLibrary lib;
  int matched = 0;
  for (int trial = 0; trial < 500; ++trial) {
    double a[2][2], b[2][2];
    for (auto& row : a)
      for (auto& x : row) x = u(rng);
    for (auto& row : b)
      for (auto& x : row) x = u(rng);
    const auto want = oracle::brute_force_2x2(a, b);
    const auto got = find_all_nash(bimatrix(a, b), lib).equilibria;
    bool ok = got.size() == want.size();
    for (const auto& w : want)
      ok = ok && std::any_of(got.begin(), got.end(), [&](const EquilibriumCandidate& e) {
             return std::abs(e.profile.sigma[0][1] - w.p) <= kValueTol8 && std::abs(e.profile.sigma[1][1] - w.q) <= kValueTol8;
           });
    matched += ok;
  }
  const GameFormat f3({1, 1, 1});
  int sound = 0, odd = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<double>> p(3, std::vector<double>(f3.outcomes()));
    for (auto& row : p)
      for (auto& x : row) x = u(rng);
    const Game g(f3, p);
    const auto eq = find_all_nash(g, lib).equilibria;
    sound += std::all_of(eq.begin(), eq.end(),
                         [&](const EquilibriumCandidate& e) { return check_equilibrium(g, e.profile, kCheckTol8).is_nash; });
    odd += eq.size() % 2;
  }
  return {matched == 500 && sound == 100 && odd >= kOddShare8 * 100,
          "2x2 oracle " + std::to_string(matched) + "/500, 2x2x2 sound " + std::to_string(sound) + "/100, odd counts " +
              std::to_string(odd) + "/100"};
}

Outcome criterion9() {
  int ok = 0, total = 0;
  for (const char* name : {"start_3x3x3.phc", "target_3x3x3.phc"}) {
    ++total;
    const auto s = read_system(oracle::data(name));
    const auto back = parse_system(format_system(s));
    ok += back == s && format_system(back) == format_system(s);
  }
  for (const char* name : {"target_3x3x3.real_roots", "target_3x3x3.roots_excerpt", "start_3x3x3.roots"}) {
    ++total;
    const auto r = read_solutions(oracle::data(name));
    const auto text = format_solutions(r, 6);
    ok += parse_solutions(text) == r && format_solutions(parse_solutions(text), 6) == text;
  }
  return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " files round-trip identically"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit;  // seconds, 0 for none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "totally nonsingular 6x6 matrix", kLimit1, criterion1},
      {2, "start roots of format (3;3,3,3)", kLimit2, criterion2},
      {3, "start roots of format (3;2,2,2)", 0, criterion3},
      {4, "Bernstein numbers vs brute-force permanents", kLimit4, criterion4},
      {5, "homotopy reproduces the reference roots", kLimit5, criterion5},
      {6, "residual validation of reference roots", kLimit6, criterion6},
      {7, "reduced-support candidate rejected on slack", 0, criterion7},
      {8, "completeness on random small games", kLimit8, criterion8},
      {9, "system and solution file round-trips", 0, criterion9},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o{false, ""};
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.limit == 0 || secs < c.limit;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("[%s] criterion %d: %s: %s (%.3f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                c.limit == 0 ? "" : (in_time ? ", within limit" : ", over time limit"));
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
