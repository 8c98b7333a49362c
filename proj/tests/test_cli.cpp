#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "nashcont/cli.hpp"
#include "oracles.hpp"

using namespace nashcont;

#ifndef NASHCONT_SAMPLES
#define NASHCONT_SAMPLES "samples"
#endif

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "nashcont");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string sample(const std::string& name) { return std::string(NASHCONT_SAMPLES) + "/" + name; }

std::filesystem::path scratch(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() / ("nashcont_cli_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string squeeze(const std::string& s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

bool has_reference_real_root(const std::vector<SolutionRecord>& recs) {
  const std::vector<double> want{1.27522488578381,   0.745738698011832,  -0.104186142941727,
                                 -1.12076297688423, -0.509803187724616, 0.444045922481355};
  return std::any_of(recs.begin(), recs.end(), [&](const SolutionRecord& r) {
    const auto v = aligned_values(r, {"s11", "s12", "s21", "s22", "s31", "s32"});
    for (std::size_t q = 0; q < v.size(); ++q)
      if (std::abs(v[q] - want[q]) > 1e-6) return false;
    return true;
  });
}

}  // namespace

TEST(Cli, RequiresASubcommand) {
  EXPECT_NE(run({}).code, 0);
  EXPECT_NE(run({"frobnicate"}).code, 0);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, FormatSpec) {
  EXPECT_EQ(parse_format_spec("3:3,3,3").ds(), (std::vector<int>{2, 2, 2}));
  EXPECT_EQ(parse_format_spec("2:4,2").ds(), (std::vector<int>{3, 1}));
  EXPECT_THROW(parse_format_spec("3:3,3"), std::invalid_argument);
  EXPECT_THROW(parse_format_spec("3;3,3,3"), std::invalid_argument);
  EXPECT_THROW(parse_format_spec("2:1,3"), std::invalid_argument);
}

TEST(Cli, Pure) {
  const auto r = run({"pure", sample("prisoners_dilemma.json")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("1 pure strict equilibrium"), std::string::npos);
  EXPECT_NE(r.out.find("row=defect column=defect"), std::string::npos);
}

TEST(Cli, SolveText) {
  const auto r = run({"solve", sample("battle_of_sexes.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("3 Nash equilibria"), std::string::npos);
  EXPECT_NE(r.out.find("opera=0.600000000000"), std::string::npos);
}

TEST(Cli, SolveJson) {
  const auto r = run({"solve", sample("three_player.json"), "--json", "--all-candidates", "--workers", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["format"], "3:2,2,2");
  EXPECT_EQ(j["equilibria"].size() % 2, 1u);
  EXPECT_GE(j["candidates"].size(), j["equilibria"].size());
  for (const auto& e : j["equilibria"]) EXPECT_EQ(e["classification"], "nash");
  const auto direct = nlohmann::json::parse(run({"solve", sample("three_player.json"), "--json", "--method", "direct"}).out);
  EXPECT_EQ(direct["equilibria"].size(), j["equilibria"].size());
}

TEST(Cli, SolveTotallyMixedOnly) {
  const auto r = run({"solve", sample("battle_of_sexes.json"), "--supports", "totally-mixed", "--json"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  // Pure strict equilibria are always reported; the mixed one comes from the full support.
  EXPECT_EQ(j["equilibria"].size(), 3u);
  EXPECT_EQ(run({"solve", sample("matching_pennies.json"), "--supports", "totally-mixed"}).code, 0);
}

TEST(Cli, SolveErrors) {
  auto r = run({"solve", "/nonexistent.json"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  EXPECT_NE(run({"solve", sample("matching_pennies.json"), "--supports", "some"}).code, 0);
  const auto dir = scratch("bad");
  std::ofstream(dir / "bad.json") << R"({"strategies": [2, 2], "payoffs": [1, 2, 3]})";
  r = run({"solve", (dir / "bad.json").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("flat payoff list"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Cli, StartSystemToStdout) {
  const auto r = run({"start-system", "--format", "3:2,2,2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("2 start roots"), std::string::npos);
  EXPECT_EQ(run({"start-system", "--format", "3:2,2"}).code, 1);
}

TEST(Cli, StartSystemFilesMatchReference) {
  const auto dir = scratch("start");
  const auto r = run({"start-system", "--format", "3:3,3,3", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(squeeze(slurp(dir / "start_3_3_3.phc")), squeeze(slurp(oracle::data("start_3x3x3.phc"))));
  const auto roots = read_solutions((dir / "start_3_3_3.phc.roots").string());
  EXPECT_EQ(roots.size(), 10u);
  const auto entry = start_entry_from_json(nlohmann::json::parse(slurp(dir / "start_3_3_3.json")));
  EXPECT_EQ(entry.roots.size(), 10u);
  std::filesystem::remove_all(dir);
}

TEST(Cli, TrackReferenceFiles) {
  const auto dir = scratch("track");
  const auto out = (dir / "sols").string();
  const auto r = run({"track", "--start", oracle::data("start_3x3x3.phc"), "--roots", oracle::data("start_3x3x3.roots"),
                      "--target", oracle::data("target_3x3x3.phc"), "--workers", "3", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.err.empty()) << r.err;
  const auto recs = read_solutions(out);
  ASSERT_EQ(recs.size(), 10u);
  EXPECT_TRUE(has_reference_real_root(recs));
  for (const auto& rec : recs) EXPECT_LE(rec.res, 1e-10);

  const auto v = run({"validate", "--system", oracle::data("target_3x3x3.phc"), "--solutions", out});
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(v.out.find("above tolerance"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Cli, TrackFromGeneratedStartFiles) {
  const auto dir = scratch("gen");
  ASSERT_EQ(run({"start-system", "--format", "3:3,3,3", "--out", dir.string()}).code, 0);
  const auto r = run({"track", "--start", (dir / "start_3_3_3.phc").string(), "--roots",
                      (dir / "start_3_3_3.phc.roots").string(), "--target", oracle::data("target_3x3x3.phc"),
                      "--gamma-seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(has_reference_real_root(parse_solutions(r.out)));
  std::filesystem::remove_all(dir);
}

TEST(Cli, TrackShapeMismatch) {
  const auto dir = scratch("shape");
  std::ofstream(dir / "small.phc") << "2\n x - 1;\n y - 2;\n";
  const auto r = run({"track", "--start", (dir / "small.phc").string(), "--roots", oracle::data("start_3x3x3.roots"),
                      "--target", oracle::data("target_3x3x3.phc")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("shape"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Cli, Validate) {
  const auto r = run({"validate", "--system", oracle::data("target_3x3x3.phc"), "--solutions",
                      oracle::data("target_3x3x3.real_roots"), "--digits", "32"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "THE RESIDUALS with 32 decimal places :");
  EXPECT_NE(r.out.find("residual 1 : "), std::string::npos);
}

TEST(Cli, SamplesParse) {
  for (const auto& e : std::filesystem::directory_iterator(NASHCONT_SAMPLES)) {
    if (e.path().extension() != ".json") continue;
    const auto g = read_game(e.path().string());
    const auto back = game_from_json(game_to_json(g));
    EXPECT_EQ(back.game.payoffs(), g.game.payoffs()) << e.path();
  }
}
