#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bmatch/emulator.hpp"
#include "bmatch/executor.hpp"
#include "bmatch/formats.hpp"
#include "bmatch/ir_text.hpp"
#include "bmatch/matcher.hpp"
#include "bmatch/transforms.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

unsigned default_workers() {
  if (const char* env = std::getenv("BMATCH_WORKERS")) {
    int v = std::atoi(env);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return 1;
}

bmatch::MatchConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  return bmatch::parse_match_config(bmatch::read_text_file(path));
}

struct RecordOutput {
  bmatch::RecordFile record_file;
  bmatch::SignatureFile signature_file;
  bool complete = false;
};

RecordOutput run_record(const bmatch::Program& program, const std::string& function,
                        const bmatch::TestInput& input, const bmatch::MatchConfig& cfg) {
  bmatch::ExecutionResult result =
      bmatch::execute(program, function, input, cfg.execution_budget);
  RecordOutput out;
  out.record_file.record = result.record;
  out.record_file.function = function;
  out.record_file.status = bmatch::execution_status_to_string(result);
  out.signature_file.signature = result.signature;
  out.signature_file.status = out.record_file.status;
  out.complete = result.status == bmatch::ExecutionResult::Status::Complete;
  return out;
}

int cmd_record(const std::string& program_path, const std::string& function,
               const std::string& input_path, const std::string& out_record,
               const std::string& out_sig, const std::string& config_path) {
  bmatch::MatchConfig cfg = load_config(config_path);
  bmatch::Program program = bmatch::parse_program(bmatch::read_text_file(program_path));
  bmatch::TestInput input = bmatch::parse_test_input(bmatch::read_text_file(input_path));
  RecordOutput out = run_record(program, function, input, cfg);
  bmatch::write_text_file(out_record, bmatch::render_record_file(out.record_file));
  bmatch::write_text_file(out_sig, bmatch::render_signature_file(out.signature_file));
  if (!out.complete) {
    std::cerr << "execution did not complete: " << out.record_file.status << "\n";
    return 2;
  }
  return 0;
}

int cmd_match(const std::string& record_path, const std::string& sig_path,
              const std::string& target_path, const std::string& out_rank,
              const std::string& config_path, unsigned workers) {
  bmatch::MatchConfig cfg = load_config(config_path);
  bmatch::RecordFile record = bmatch::parse_record_file(bmatch::read_text_file(record_path));
  bmatch::SignatureFile sig = bmatch::parse_signature_file(bmatch::read_text_file(sig_path));
  bmatch::Program target = bmatch::parse_program(bmatch::read_text_file(target_path));
  bmatch::RankedList list = bmatch::rank_with_record(record.function, sig.signature,
                                                     record.record, target, cfg, workers);
  bmatch::write_text_file(out_rank, bmatch::render_ranked_list(list));
  return 0;
}

int cmd_eval(const std::string& manifest_path, const std::string& config_path,
             const std::vector<std::uint32_t>& k_values, unsigned workers,
             const std::string& artifacts_dir, const std::string& json_path) {
  bmatch::MatchConfig cfg = load_config(config_path);
  fs::path base = fs::path(manifest_path).parent_path();
  auto rows = bmatch::parse_manifest(bmatch::read_text_file(manifest_path));
  if (rows.empty()) {
    std::cerr << "manifest has no rows\n";
    return 1;
  }
  if (!artifacts_dir.empty()) fs::create_directories(artifacts_dir);

  std::vector<bmatch::RankedList> lists;
  std::vector<std::string> notes(rows.size());
  bmatch::GroundTruth truth;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    truth.expected[row.reference_function] = row.expected_function;
    bmatch::RankedList list;
    list.reference = row.reference_function;
    try {
      bmatch::Program ref =
          bmatch::parse_program(bmatch::read_text_file((base / row.reference_path).string()));
      bmatch::TestInput input =
          bmatch::parse_test_input(bmatch::read_text_file((base / row.input_path).string()));
      bmatch::Program target =
          bmatch::parse_program(bmatch::read_text_file((base / row.target_path).string()));
      if (!target.find_function(row.expected_function)) {
        throw bmatch::ConfigError("expected function '" + row.expected_function +
                                  "' does not exist in target");
      }
      RecordOutput rec = run_record(ref, row.reference_function, input, cfg);
      list = bmatch::rank_with_record(rec.record_file.function, rec.signature_file.signature,
                                      rec.record_file.record, target, cfg, workers);
      if (!artifacts_dir.empty()) {
        char stem[32];
        std::snprintf(stem, sizeof(stem), "row%03zu", i);
        fs::path prefix = fs::path(artifacts_dir) / stem;
        bmatch::write_text_file(prefix.string() + ".bmrec",
                                bmatch::render_record_file(rec.record_file));
        bmatch::write_text_file(prefix.string() + ".bmsig",
                                bmatch::render_signature_file(rec.signature_file));
        bmatch::write_text_file(prefix.string() + ".bmrank", bmatch::render_ranked_list(list));
      }
    } catch (const std::exception& err) {
      // Row failures degrade to misses; the corpus still gets a verdict.
      notes[i] = err.what();
      list.entries.clear();
    }
    lists.push_back(std::move(list));
  }

  bmatch::EvalReport report = bmatch::make_eval_report(lists, truth, k_values);
  for (std::size_t i = 0; i < rows.size(); ++i) report.rows[i].note = notes[i];

  std::printf("references: %zu\n", report.reference_count);
  std::printf("%-24s %-24s %s\n", "reference", "expected", "hit-rank");
  for (const auto& row : report.rows) {
    std::string rank = row.hit_rank ? std::to_string(*row.hit_rank) : "-";
    if (!row.note.empty()) rank += " (" + row.note + ")";
    std::printf("%-24s %-24s %s\n", row.reference.c_str(), row.expected.c_str(), rank.c_str());
  }
  for (std::uint32_t k : report.k_values) {
    std::printf("accuracy@%u = %.4f (%u/%zu)\n", k, report.accuracy[k], report.found[k],
                report.reference_count);
  }

  if (!json_path.empty()) {
    json j;
    j["references"] = report.reference_count;
    j["k"] = report.k_values;
    json acc = json::object();
    json found = json::object();
    for (std::uint32_t k : report.k_values) {
      acc[std::to_string(k)] = report.accuracy[k];
      found[std::to_string(k)] = report.found[k];
    }
    j["accuracy"] = acc;
    j["found"] = found;
    json jrows = json::array();
    for (const auto& row : report.rows) {
      json r;
      r["reference"] = row.reference;
      r["expected"] = row.expected;
      if (row.hit_rank) {
        r["hit_rank"] = *row.hit_rank;
      } else {
        r["hit_rank"] = nullptr;
      }
      r["note"] = row.note;
      jrows.push_back(r);
    }
    j["rows"] = jrows;
    bmatch::write_text_file(json_path, j.dump(2) + "\n");
  }
  return 0;
}

int cmd_transform(const std::string& in_path, const std::string& function,
                  const std::string& kind_name, const std::string& out_path, std::uint64_t seed) {
  auto kind = bmatch::transform_kind_from_name(kind_name);
  if (!kind) {
    std::cerr << "unknown transform kind '" << kind_name
              << "' (expected rename|reorder|sub|bcf|fla|inline_callee)\n";
    return 1;
  }
  bmatch::Program program = bmatch::parse_program(bmatch::read_text_file(in_path));
  bmatch::Program out = bmatch::transform(program, function, *kind, seed);
  bmatch::write_text_file(out_path, bmatch::render_program(out));
  return 0;
}

int cmd_inspect(const std::string& path) {
  std::string ext = fs::path(path).extension().string();
  std::string text = bmatch::read_text_file(path);
  if (ext == ".bmir") {
    bmatch::Program program = bmatch::parse_program_syntax(text);
    bmatch::ValidationReport report = bmatch::validate(program);
    if (!report.ok()) {
      std::cerr << report.to_string();
      return 1;
    }
    std::cout << bmatch::render_program(program);
    return 0;
  }
  if (ext == ".bmsig") {
    bmatch::SignatureFile sig = bmatch::parse_signature_file(text);
    std::printf("signature: %zu features, status %s\n", sig.signature.length(),
                sig.status.c_str());
    return 0;
  }
  if (ext == ".bmrec") {
    bmatch::RecordFile rec = bmatch::parse_record_file(text);
    std::printf("record of %s: status %s, %zu args, %zu global reads, %zu icalls, "
                "%zu subroutine returns, %zu library results\n",
                rec.function.c_str(), rec.status.c_str(), rec.record.arg_values.size(),
                rec.record.global_reads.size(), rec.record.indirect_targets.size(),
                rec.record.subroutine_returns.size(), rec.record.library_results.size());
    return 0;
  }
  if (ext == ".bmrank") {
    bmatch::RankedList list = bmatch::parse_ranked_list(text);
    std::printf("ranked list for %s: %zu entries\n", list.reference.c_str(),
                list.entries.size());
    return 0;
  }
  if (ext == ".bmin") {
    bmatch::TestInput input = bmatch::parse_test_input(text);
    std::printf("test input: %zu args, %zu overrides, %zu scripted libraries\n",
                input.args.size(), input.global_overrides.size(), input.library_script.size());
    return 0;
  }
  if (ext == ".bmcfg") {
    bmatch::MatchConfig cfg = bmatch::parse_match_config(text);
    std::cout << bmatch::render_match_config(cfg);
    return 0;
  }
  std::cerr << "unknown file extension '" << ext << "'\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bmatch: semantics-based function similarity over the bmir register IR"};
  app.require_subcommand(1);

  std::string program_path, function, input_path, out_record, out_sig, config_path;
  auto* record = app.add_subcommand("record", "execute a reference function, write .bmrec/.bmsig");
  record->add_option("program", program_path, "reference program (.bmir)")->required();
  record->add_option("function", function, "reference function name")->required();
  record->add_option("input", input_path, "test input (.bmin)")->required();
  record->add_option("out_record", out_record, "output record path (.bmrec)")->required();
  record->add_option("out_sig", out_sig, "output signature path (.bmsig)")->required();
  record->add_option("--config", config_path, "config file (.bmcfg)");

  std::string record_path, sig_path, target_path, out_rank;
  unsigned workers = default_workers();
  auto* match = app.add_subcommand("match", "emulate all target functions, write .bmrank");
  match->add_option("record", record_path, "reference record (.bmrec)")->required();
  match->add_option("sig", sig_path, "reference signature (.bmsig)")->required();
  match->add_option("target", target_path, "target program (.bmir)")->required();
  match->add_option("out_rank", out_rank, "output ranked list (.bmrank)")->required();
  match->add_option("--config", config_path, "config file (.bmcfg)");
  match->add_option("--workers", workers, "emulation worker count");

  std::string manifest_path, artifacts_dir, json_path;
  std::vector<std::uint32_t> k_values{1, 5, 10};
  auto* eval = app.add_subcommand("eval", "run a manifest and report top-K accuracy");
  eval->add_option("manifest", manifest_path, "corpus manifest")->required();
  eval->add_option("--config", config_path, "config file (.bmcfg)");
  eval->add_option("--k", k_values, "K values (comma separated)")->delimiter(',');
  eval->add_option("--workers", workers, "emulation worker count");
  eval->add_option("--artifacts", artifacts_dir, "directory for per-row .bmrec/.bmsig/.bmrank");
  eval->add_option("--json", json_path, "machine-readable report path");

  std::string kind_name, out_path;
  std::uint64_t seed = 0;
  auto* transform = app.add_subcommand("transform", "apply a semantics-preserving transform");
  transform->add_option("program", program_path, "input program (.bmir)")->required();
  transform->add_option("function", function, "function to transform")->required();
  transform->add_option("kind", kind_name, "rename|reorder|sub|bcf|fla|inline_callee")->required();
  transform->add_option("out", out_path, "output program path (.bmir)")->required();
  transform->add_option("--seed", seed, "transform seed");

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "validate and summarize a bmatch file");
  inspect->add_option("file", inspect_path, "file to inspect")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (record->parsed()) {
      return cmd_record(program_path, function, input_path, out_record, out_sig, config_path);
    }
    if (match->parsed()) {
      return cmd_match(record_path, sig_path, target_path, out_rank, config_path, workers);
    }
    if (eval->parsed()) {
      return cmd_eval(manifest_path, config_path, k_values, workers, artifacts_dir, json_path);
    }
    if (transform->parsed()) {
      return cmd_transform(program_path, function, kind_name, out_path, seed);
    }
    if (inspect->parsed()) {
      return cmd_inspect(inspect_path);
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 1;
}
