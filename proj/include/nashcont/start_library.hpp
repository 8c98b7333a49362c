#ifndef NASHCONT_START_LIBRARY_HPP
#define NASHCONT_START_LIBRARY_HPP

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "nashcont/start_system.hpp"

namespace nashcont {

/// A start system together with all of its exact roots.
struct StartEntry {
  FactoredStartSystem system;
  std::vector<std::vector<Rational>> roots;
  std::vector<std::string> notes;  // fallbacks taken while building
};

inline constexpr int kStartLibraryVersion = 1;

inline nlohmann::json start_entry_to_json(const StartEntry& e) {
  nlohmann::json j;
  j["version"] = kStartLibraryVersion;
  std::vector<int> counts;
  for (int d : e.system.format.ds()) counts.push_back(d + 1);
  j["strategies"] = counts;
  j["matrix_source"] = e.system.matrix.source;
  auto& m = j["matrix"] = nlohmann::json::array();
  for (const auto& row : e.system.matrix.entries) {
    auto r = nlohmann::json::array();
    for (const auto& q : row) r.push_back(q.get_str());
    m.push_back(std::move(r));
  }
  auto& roots = j["roots"] = nlohmann::json::array();
  for (const auto& root : e.roots) {
    auto r = nlohmann::json::array();
    for (const auto& q : root) r.push_back(q.get_str());
    roots.push_back(std::move(r));
  }
  j["notes"] = e.notes;
  return j;
}

/// Rebuilds the entry and checks every stored root exactly.
inline StartEntry start_entry_from_json(const nlohmann::json& j) {
  if (j.value("version", 0) != kStartLibraryVersion) throw std::runtime_error("unsupported start library version");
  const auto format = GameFormat::from_strategy_counts(j.at("strategies").get<std::vector<int>>());
  TNMatrix m;
  m.source = j.value("matrix_source", std::string("unknown"));
  for (const auto& row : j.at("matrix")) {
    std::vector<Rational> r;
    for (const auto& s : row) r.push_back(parse_rational(s.get<std::string>()));
    m.entries.push_back(std::move(r));
  }
  StartEntry e{build_start_system(format, m), {}, j.value("notes", std::vector<std::string>{})};
  for (const auto& row : j.at("roots")) {
    std::vector<Rational> r;
    for (const auto& s : row) r.push_back(parse_rational(s.get<std::string>()));
    for (const auto& v : e.system.evaluate_factored(r))
      if (v != 0) throw std::runtime_error("cached start root does not satisfy its start system");
    e.roots.push_back(std::move(r));
  }
  if (e.roots.size() != bernstein_number(format)) throw std::runtime_error("cached start library has wrong root count");
  return e;
}

/// Builds the start system of a format with distinct roots: the default
/// injection first, then the linear one, then seeded random matrices.
inline StartEntry build_start_entry(const GameFormat& format, const Injection& first = Injection::powers_of_two()) {
  StartEntry e;
  auto attempt = [&](TNMatrix m) {
    e.system = build_start_system(format, m);
    e.roots = start_roots(e.system);
    if (coinciding_roots(e.roots).empty()) return true;
    e.notes.push_back("coinciding start roots with matrix " + m.source);
    return false;
  };
  if (attempt(build_tn_matrix(format.total(), first))) return e;
  if (first.name != "linear" && attempt(build_tn_matrix(format.total(), Injection::linear()))) return e;
  for (std::uint64_t seed = 1; seed <= 16; ++seed)
    if (attempt(random_tn_matrix(format.total(), seed))) return e;
  throw std::runtime_error("could not find a start system with distinct roots for format " + format.to_string());
}

/// Format-keyed cache of start systems, optionally persisted to a directory.
class StartLibrary {
public:
  explicit StartLibrary(std::optional<std::filesystem::path> dir = std::nullopt, bool allow_build = true,
                        Injection injection = Injection::powers_of_two())
      : dir_(std::move(dir)), allow_build_(allow_build), injection_(std::move(injection)) {}

  /// Cache directory from NASHCONT_CACHE_DIR, memory-only when unset.
  static StartLibrary from_environment(bool allow_build = true) {
    const char* env = std::getenv("NASHCONT_CACHE_DIR");
    if (env && *env) return StartLibrary(std::filesystem::path(env), allow_build);
    return StartLibrary(std::nullopt, allow_build);
  }

  const std::optional<std::filesystem::path>& directory() const { return dir_; }

  std::filesystem::path file_for(const GameFormat& format) const {
    std::string name = "start_" + injection_.name;
    for (int d : format.ds()) name += "_" + std::to_string(d + 1);
    return dir_.value_or(".") / (name + ".json");
  }

  std::shared_ptr<const StartEntry> get(const GameFormat& format) {
    const std::string key = injection_.name + "|" + format.to_string();
    std::lock_guard lock(mutex_);
    if (auto it = memory_.find(key); it != memory_.end()) return it->second;
    std::shared_ptr<const StartEntry> entry;
    if (dir_) {
      const auto path = file_for(format);
      if (std::filesystem::exists(path)) {
        std::ifstream in(path);
        entry = std::make_shared<StartEntry>(start_entry_from_json(nlohmann::json::parse(in)));
      }
    }
    if (!entry) {
      if (!allow_build_) throw std::runtime_error("no cached start system for format " + format.to_string());
      entry = std::make_shared<StartEntry>(build_start_entry(format, injection_));
      if (dir_) {
        std::filesystem::create_directories(*dir_);
        std::ofstream out(file_for(format));
        out << start_entry_to_json(*entry).dump(1) << '\n';
        if (!out) throw std::runtime_error("cannot write start library file " + file_for(format).string());
      }
    }
    memory_.emplace(key, entry);
    return entry;
  }

private:
  std::optional<std::filesystem::path> dir_;
  bool allow_build_;
  Injection injection_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const StartEntry>> memory_;
};

}  // namespace nashcont

#endif  // NASHCONT_START_LIBRARY_HPP
