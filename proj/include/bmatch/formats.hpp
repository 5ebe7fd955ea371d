#pragma once

#include <string>
#include <vector>

#include "bmatch/executor.hpp"
#include "bmatch/matcher.hpp"
#include "bmatch/signature.hpp"
#include "bmatch/similarity.hpp"

namespace bmatch {

// Line-oriented parse failures for the .bm* file formats.
class FormatError : public std::runtime_error {
 public:
  FormatError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// .bmin: `args 41 7` / `global 0x10000000 = 5` / `lib alloc -> 0x90000000`
TestInput parse_test_input(const std::string& text);
std::string render_test_input(const TestInput& input);

// .bmsig: header `bmsig 1 <count>`, an optional `status <token>` line for
// partial captures, then one feature per line.
struct SignatureFile {
  Signature signature;
  std::string status = "complete";
};
SignatureFile parse_signature_file(const std::string& text);
std::string render_signature_file(const SignatureFile& file);

// .bmrec: header `bmrec 1`, `func <name>`, `status <token>`, then the
// args/greads/icalls/subrets/librets sections with per-section counts.
struct RecordFile {
  RuntimeRecord record;
  std::string function;
  std::string status = "complete";
  auto operator<=>(const RecordFile&) const = default;
};
RecordFile parse_record_file(const std::string& text);
std::string render_record_file(const RecordFile& file);

// .bmcfg: `L = 512`, `P = 11.023` (or `P = inf`), `F = 64`, `K = 10`,
// `execution_budget = ...`, `emulation_budget = ...`; all optional.
MatchConfig parse_match_config(const std::string& text);
std::string render_match_config(const MatchConfig& cfg);

// .bmrank: header `ref <name>`, then `rank <i> <target> <score> <status>`
// lines; scores with 6 decimals, pruned entries printed as -1.
RankedList parse_ranked_list(const std::string& text);
std::string render_ranked_list(const RankedList& list);

// Manifest rows: `<ref.bmir> <ref_fn> <input.bmin> <target.bmir> <expected>`
// with paths taken relative to the manifest's directory.
struct ManifestRow {
  std::string reference_path;
  std::string reference_function;
  std::string input_path;
  std::string target_path;
  std::string expected_function;
};
std::vector<ManifestRow> parse_manifest(const std::string& text);

std::string read_text_file(const std::string& path);   // throws ConfigError
void write_text_file(const std::string& path, const std::string& content);

}  // namespace bmatch
