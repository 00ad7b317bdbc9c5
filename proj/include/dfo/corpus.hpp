#pragma once

#include "dfo/io.hpp"
#include "dfo/milp.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace dfo {

struct CorpusFixture {
  DFOProblem problem;
  FixtureEntry entry;
};

/// Regression corpus over every compiler route. Expected values come from
/// the brute-force oracle; refusal verdicts follow from the construction.
std::vector<CorpusFixture> build_corpus(std::uint64_t seed = 20240601);

/// Writes every fixture plus manifest.json into dir.
void write_corpus(const std::vector<CorpusFixture>& corpus, const std::filesystem::path& dir);

struct FixtureCheck {
  std::string file;
  bool passed = true;
  double max_delta = 0.0;
  std::vector<std::string> lines;  // one per method or verdict checked
};

/// Compiles and solves with every listed method, compares against the
/// expected value, verdict or error code.
FixtureCheck verify_fixture(const FixtureEntry& entry, const DFOProblem& problem, const SolverConfig& config = {},
                            double tol = 1e-5);

std::vector<FixtureCheck> verify_corpus(const std::filesystem::path& dir, const SolverConfig& config = {},
                                        double tol = 1e-5);

/// DFOKIT_FIXTURES when set, else "fixtures".
std::filesystem::path fixture_root();

}  // namespace dfo
