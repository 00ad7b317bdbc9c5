#pragma once

#include "dfo/model.hpp"
#include "dfo/reform.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dfo {

/// Malformed or invalid problem document. path is a JSON pointer to the
/// offending field.
class ParseError : public Error {
 public:
  ParseError(std::string path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)), message_(message) {}
  const std::string& path() const { return path_; }
  const std::string& message() const { return message_; }

 private:
  std::string path_;
  std::string message_;
};

/// Parses and validates a problem document.
DFOProblem parse_problem(const std::string& text);
DFOProblem load_problem(const std::filesystem::path& file);

/// Pretty-printed JSON; parse_problem(serialize_problem(p)) reproduces p.
std::string serialize_problem(const DFOProblem& problem);

/// Original-to-MPS name pairs.
using NameMap = std::vector<std::pair<std::string, std::string>>;

struct MpsDocument {
  std::string text;
  NameMap columns;
  NameMap rows;
  int renamed = 0;  // names that did not fit the 8-character fields

  std::string name_map() const;
};

/// Fixed-format MPS with deterministic 8-character names. Names that are too
/// long, blank, duplicated or reserved are replaced by C%07d / R%07d.
MpsDocument write_mps(const LinearProgram& program, const std::string& name = "DFO");

struct ExportedFile {
  std::filesystem::path mps;
  std::filesystem::path names;
  int renamed = 0;
};

/// One MPS file per program (B<index>_<label>.mps for batches, <stem>.mps
/// otherwise), a .names sidecar for each, and <stem>.json with the ledger.
std::vector<ExportedFile> export_compiled(const CompiledProgram& compiled, const std::filesystem::path& dir,
                                          const std::string& stem);

std::string compiled_to_json(const CompiledProgram& compiled);
std::string result_to_json(const CompiledProgram& compiled, const CompiledResult& result);

/// One expectation of the fixture corpus.
struct FixtureEntry {
  std::string file;
  std::string route;                     // compiler family exercised
  std::vector<std::string> methods;      // solve methods expected to agree
  std::optional<double> expected;        // oracle value
  std::optional<std::string> verdict;    // expected classify status
  std::optional<std::string> citation;   // expected classify citation
  std::optional<std::string> error;      // expected compile error code
};

std::vector<FixtureEntry> read_manifest(const std::filesystem::path& file);
std::string manifest_to_json(const std::vector<FixtureEntry>& entries);

std::string read_text(const std::filesystem::path& file);
void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace dfo
