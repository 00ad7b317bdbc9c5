#include "doctest.h"
#include "dfo/cli.hpp"
#include "dfo/corpus.hpp"
#include "dfo/io.hpp"

#include <filesystem>
#include <sstream>
#include <vector>

using namespace dfo;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome dfokit(std::vector<std::string> args) {
  args.insert(args.begin(), "dfokit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

double value_line(const std::string& out) {
  const auto pos = out.find("v* = ");
  REQUIRE(pos != std::string::npos);
  return std::stod(out.substr(pos + 5));
}

}  // namespace

TEST_CASE("solve prints the optimal value") {
  const auto r = dfokit({"solve", "fixtures/finite_simplex_3.json"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("v* = 1.4\n", 0) == 0);
  CHECK(r.out.find("member: ") != std::string::npos);
  CHECK(r.out.find("x = [") != std::string::npos);
  CHECK(r.out.find("big-M: ") != std::string::npos);
  const auto kkt = dfokit({"solve", "--method", "kkt", "fixtures/finite_simplex_3.json"});
  CHECK(kkt.code == 0);
  CHECK(kkt.out.find("M_1,2 = 0.8") != std::string::npos);
}

TEST_CASE("classify refuses p = 2 with the citation") {
  const auto r = dfokit({"classify", "fixtures/sdfo_p2_refusal.json"});
  CHECK(r.code == 1);
  CHECK(r.out.rfind("NotMICPR (Thm 3.3 case 2)\n", 0) == 0);
  CHECK(r.out.find("midpoint certificate passes") != std::string::npos);
  const auto ok = dfokit({"classify", "fixtures/finite_simplex_3.json"});
  CHECK(ok.code == 0);
  CHECK(ok.out.rfind("MICPR (Thm 4.3)", 0) == 0);
}

TEST_CASE("kkt without bounds reports MissingBounds") {
  const auto r = dfokit({"solve", "--method", "kkt", "fixtures/kkt_missing_bounds.json"});
  CHECK(r.code == 1);
  CHECK(r.err.find("MissingBounds") != std::string::npos);
  CHECK(dfokit({"solve", "--method", "enumerate", "fixtures/kkt_missing_bounds.json"}).code == 0);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(dfokit({}).code == 2);
  CHECK(dfokit({"solve"}).code == 2);
  CHECK(dfokit({"solve", "--method", "bilinear", "fixtures/finite_simplex_3.json"}).code == 2);
  CHECK(dfokit({"frobnicate"}).code == 2);
  CHECK(dfokit({"--help"}).code == 0);
  CHECK(dfokit({"solve", "fixtures/does_not_exist.json"}).code == 1);
}

TEST_CASE("enumerate and kkt agree on every finite fixture") {
  int seen = 0;
  for (const auto& e : read_manifest("fixtures/manifest.json")) {
    if (e.route != "finite") continue;
    const std::string file = "fixtures/" + e.file;
    const auto a = dfokit({"solve", "--method", "enumerate", file});
    const auto b = dfokit({"solve", "--method", "kkt", file});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(std::abs(value_line(a.out) - value_line(b.out)) <= 1e-5);
    ++seen;
  }
  CHECK(seen >= 20);
}

TEST_CASE("exit codes and output are stable across runs") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"solve", "fixtures/interval_uniform_00.json"},
           {"classify", "fixtures/l2_ball_refusal_03.json"},
           {"solve", "--method", "kkt", "fixtures/kkt_missing_bounds.json"}}) {
    const auto a = dfokit(args);
    const auto b = dfokit(args);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("export writes one MPS per batch member") {
  const auto dir = std::filesystem::temp_directory_path() / "dfokit_export_test";
  std::filesystem::remove_all(dir);
  const auto r = dfokit({"export", "fixtures/interval_00.json", "--out", dir.string()});
  CHECK(r.code == 0);
  int mps = 0;
  for (const auto& f : std::filesystem::directory_iterator(dir)) {
    if (f.path().extension() == ".mps") {
      ++mps;
      CHECK(f.path().filename().string()[0] == 'B');
    }
  }
  const auto compiled = compile(load_problem("fixtures/interval_00.json"));
  CHECK(mps == static_cast<int>(compiled.programs.size()));
  CHECK(std::filesystem::exists(dir / "interval_00.json"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("verify a single document against the oracle") {
  const auto r = dfokit({"verify", "fixtures/sdfo_convex_03.json"});
  CHECK(r.code == 0);
  CHECK(r.out.find("delta ") != std::string::npos);
}

TEST_CASE("gen-fixture set-partition emits a parseable document") {
  const auto r = dfokit({"gen-fixture", "set-partition", "--weights", "1,2,3"});
  CHECK(r.code == 0);
  const auto body = r.out.substr(r.out.find('{'));
  CHECK_NOTHROW(parse_problem(body));
  CHECK(dfokit({"gen-fixture", "nonsense"}).code == 2);
}
