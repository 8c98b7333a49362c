#ifndef NASHCONT_CLI_HPP
#define NASHCONT_CLI_HPP

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "nashcont/game_file.hpp"
#include "nashcont/homotopy.hpp"
#include "nashcont/nash.hpp"
#include "nashcont/phc_format.hpp"
#include "nashcont/start_library.hpp"
#include "nashcont/start_system.hpp"

namespace nashcont {

/// "N:c1,...,cN" with strategy counts c_i >= 2.
inline GameFormat parse_format_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("format must look like N:c1,...,cN, got '" + spec + "'");
  std::vector<int> counts;
  int players = 0;
  try {
    players = std::stoi(spec.substr(0, colon));
    std::stringstream rest(spec.substr(colon + 1));
    for (std::string item; std::getline(rest, item, ',');) counts.push_back(std::stoi(item));
  } catch (const std::exception&) {
    throw std::invalid_argument("format must look like N:c1,...,cN, got '" + spec + "'");
  }
  if (players != static_cast<int>(counts.size()))
    throw std::invalid_argument("format '" + spec + "' lists " + std::to_string(counts.size()) + " strategy counts for " +
                                std::to_string(players) + " players");
  return GameFormat::from_strategy_counts(counts);
}

/// Start system with equations in reverse order, so that reading the file
/// back numbers the unknowns in player order.
inline ComplexSystem start_system_for_file(const FactoredStartSystem& s) { return s.complex_system().reversed_equations(); }

inline std::vector<SolutionRecord> start_root_records(const FactoredStartSystem& s,
                                                      const std::vector<std::vector<Rational>>& roots) {
  std::vector<SolutionRecord> out;
  for (std::size_t k = 0; k < roots.size(); ++k) {
    SolutionRecord r;
    r.index = static_cast<int>(k + 1);
    for (std::size_t v = 0; v < roots[k].size(); ++v) r.coordinates.emplace_back(s.names()[v], to_complex(roots[k][v]));
    out.push_back(std::move(r));
  }
  return out;
}

namespace detail {

inline std::string fmt_prob(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12f", std::abs(x) < 5e-13 ? 0.0 : x);
  return buf;
}

inline std::string strategy_name(const GameFile& g, int i, int j) {
  if (!g.strategy_labels.empty()) return g.strategy_labels[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return std::to_string(j);
}

inline std::string player_name(const GameFile& g, int i) {
  if (!g.player_labels.empty()) return g.player_labels[static_cast<std::size_t>(i)];
  return "player " + std::to_string(i + 1);
}

inline nlohmann::json candidate_json(const EquilibriumCandidate& c) {
  nlohmann::json j;
  j["classification"] = to_string(c.classification);
  j["support"] = c.support.strategies;
  j["profile"] = c.profile.sigma;
  j["regrets"] = c.slack.v;
  if (c.path >= 0) j["path"] = c.path + 1;
  return j;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  f << text;
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
}

}  // namespace detail

/// Command-line entry point; returns the process exit code.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Nash equilibria of normal-form games by homotopy continuation"};
  app.require_subcommand(1);

  std::string game_path;
  auto* pure = app.add_subcommand("pure", "list pure strict Nash equilibria");
  pure->add_option("game", game_path, "game file (JSON)")->required();

  std::string supports = "all", method = "library";
  unsigned workers = 1;
  std::uint64_t seed = 0;
  bool as_json = false, all_candidates = false;
  auto* solve = app.add_subcommand("solve", "find all Nash equilibria");
  solve->add_option("game", game_path, "game file (JSON)")->required();
  solve->add_option("--supports", supports, "all | generic | totally-mixed")
      ->check(CLI::IsMember({"all", "generic", "totally-mixed"}));
  solve->add_option("--method", method, "start systems: library (reduced format) | direct (restricted)")
      ->check(CLI::IsMember({"library", "direct"}));
  solve->add_option("--workers", workers, "path-tracking threads")->check(CLI::Range(1u, 256u));
  solve->add_option("--seed", seed, "seed for the homotopy constant");
  solve->add_flag("--json", as_json, "JSON output");
  solve->add_flag("--all-candidates", all_candidates, "with --json, include rejected candidates");

  std::string format_spec, out_dir, injection = "pow2";
  auto* start = app.add_subcommand("start-system", "build a start system and its roots");
  start->add_option("--format", format_spec, "N:c1,...,cN (strategy counts)")->required();
  start->add_option("--out", out_dir, "directory for the system and roots files");
  start->add_option("--injection", injection, "pow2 | linear")->check(CLI::IsMember({"pow2", "linear"}));

  std::string start_path, roots_path, target_path, out_path;
  std::uint64_t gamma_seed = 0;
  int power = 2;
  auto* track = app.add_subcommand("track", "track start roots to a target system");
  track->add_option("--start", start_path, "start system file")->required();
  track->add_option("--roots", roots_path, "start roots file")->required();
  track->add_option("--target", target_path, "target system file")->required();
  track->add_option("--gamma-seed", gamma_seed, "seed for the homotopy constant");
  track->add_option("--k", power, "homotopy power")->check(CLI::PositiveNumber);
  track->add_option("--workers", workers, "path-tracking threads")->check(CLI::Range(1u, 256u));
  track->add_option("--out", out_path, "solutions file (default: standard output)");

  std::string system_path, solutions_path;
  int digits = 16;
  double tol = 1e-8;
  auto* validate = app.add_subcommand("validate", "residuals of a solution list");
  validate->add_option("--system", system_path, "polynomial system file")->required();
  validate->add_option("--solutions", solutions_path, "solutions file")->required();
  validate->add_option("--digits", digits, "decimal places of working precision")->check(CLI::PositiveNumber);
  validate->add_option("--tol", tol, "residual above which a solution is flagged");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*pure) {
      const auto g = read_game(game_path);
      const auto eq = find_pure_strict(g.game);
      out << eq.size() << " pure strict equilibri" << (eq.size() == 1 ? "um" : "a") << "\n";
      for (const auto& s : eq) {
        out << " ";
        for (std::size_t i = 0; i < s.size(); ++i)
          out << " " << detail::player_name(g, static_cast<int>(i)) << "=" << detail::strategy_name(g, static_cast<int>(i), s[i]);
        out << "\n";
      }
      return 0;
    }

    if (*solve) {
      const auto g = read_game(game_path);
      SolveOptions opt;
      opt.supports.mode = supports == "generic"         ? SupportMode::generic
                          : supports == "totally-mixed" ? SupportMode::totally_mixed
                                                        : SupportMode::all;
      opt.method = method == "direct" ? StartMethod::direct : StartMethod::start_library;
      opt.homotopy = HomotopyConfig::with_seed(seed);
      opt.workers = workers;
      StartLibrary library = StartLibrary::from_environment();
      const auto res = find_all_nash(g.game, library, opt);
      for (const auto& w : res.warnings) err << "warning: " << w << "\n";
      if (as_json) {
        nlohmann::json j;
        j["format"] = g.game.format().to_string();
        j["seed"] = seed;
        j["supports"] = supports;
        auto& eqs = j["equilibria"] = nlohmann::json::array();
        for (const auto& c : res.equilibria) eqs.push_back(detail::candidate_json(c));
        j["warnings"] = res.warnings;
        if (all_candidates) {
          auto& cs = j["candidates"] = nlohmann::json::array();
          for (const auto& c : res.candidates) cs.push_back(detail::candidate_json(c));
        }
        out << j.dump(2) << "\n";
        return 0;
      }
      out << res.equilibria.size() << " Nash equilibri" << (res.equilibria.size() == 1 ? "um" : "a") << " (format "
          << g.game.format().to_string() << ", seed " << seed << ")\n";
      int k = 0;
      for (const auto& c : res.equilibria) {
        out << "equilibrium " << ++k << "  support " << c.support.to_string() << "\n";
        for (int i = 0; i < g.game.format().players(); ++i) {
          out << "  " << detail::player_name(g, i) << ":";
          for (int j = 0; j < g.game.format().strategies(i); ++j)
            out << " " << detail::strategy_name(g, i, j) << "=" << detail::fmt_prob(c.profile.sigma[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
          out << "\n    regrets:";
          for (int j = 0; j < g.game.format().strategies(i); ++j)
            out << " " << detail::fmt_prob(c.slack.v[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
          out << "\n";
        }
      }
      return 0;
    }

    if (*start) {
      const auto format = parse_format_spec(format_spec);
      const auto entry = build_start_entry(format, Injection::by_name(injection));
      for (const auto& n : entry.notes) err << "note: " << n << "\n";
      const auto sys = start_system_for_file(entry.system);
      const auto records = start_root_records(entry.system, entry.roots);
      out << "format " << format.to_string() << ": " << sys.size() << " equations, " << entry.roots.size()
          << " start roots (matrix " << entry.system.matrix.source << ")\n";
      if (out_dir.empty()) {
        out << format_system(sys) << format_solutions(records, sys.nvars());
        return 0;
      }
      std::filesystem::create_directories(out_dir);
      std::string stem = "start";
      for (int d : format.ds()) stem += "_" + std::to_string(d + 1);
      const auto base = (std::filesystem::path(out_dir) / stem).string();
      detail::write_text(base + ".phc", format_system(sys));
      detail::write_text(base + ".phc.roots", format_solutions(records, sys.nvars()));
      detail::write_text(base + ".json", start_entry_to_json(entry).dump(1) + "\n");
      out << "wrote " << base << ".phc, " << base << ".phc.roots, " << base << ".json\n";
      return 0;
    }

    if (*track) {
      const auto q = read_system(start_path);
      const auto p = read_system(target_path);
      if (p.nvars() != q.nvars() || p.size() != q.size())
        throw std::invalid_argument("start and target systems differ in shape");
      const auto target = p.reorder_variables(q.names());
      const auto records = read_solutions(roots_path);
      std::vector<CVector> roots;
      for (const auto& r : records) roots.push_back(to_cvector(aligned_values(r, q.names())));
      auto cfg = HomotopyConfig::with_seed(gamma_seed);
      cfg.k = power;
      const auto paths = track_all(q, target, roots, cfg, workers);
      std::vector<SolutionRecord> sols;
      for (std::size_t k = 0; k < paths.size(); ++k) {
        const auto& r = paths[k];
        if (r.status != PathStatus::converged)
          err << "warning: path " << k + 1 << " " << to_string(r.status) << (r.message.empty() ? "" : " (" + r.message + ")")
              << "\n";
        SolutionRecord s;
        s.index = static_cast<int>(k + 1);
        s.t = {r.t_reached, 0.0};
        for (std::size_t v = 0; v < q.nvars(); ++v)
          s.coordinates.emplace_back(q.names()[v], r.endpoint[static_cast<Eigen::Index>(v)]);
        s.err = r.err;
        s.rco = r.rco;
        s.res = r.residual;
        sols.push_back(std::move(s));
      }
      const auto text = format_solutions(sols, q.nvars());
      if (out_path.empty()) out << text;
      else detail::write_text(out_path, text);
      return 0;
    }

    if (*validate) {
      const auto sys = read_system(system_path);
      const auto records = read_solutions(solutions_path);
      const auto reports = validate_solutions(sys, records, digits, tol);
      out << format_residuals(reports, digits);
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace nashcont

#endif  // NASHCONT_CLI_HPP
