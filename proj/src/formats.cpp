#include "bmatch/formats.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "bmatch/text_util.hpp"

namespace bmatch {

namespace {

struct Line {
  std::size_t number = 0;
  std::vector<std::string> tokens;
};

// Splits into whitespace-separated tokens, dropping blank and `#` lines.
std::vector<Line> tokenize_lines(const std::string& text) {
  std::vector<Line> lines;
  std::istringstream is(text);
  std::string raw;
  std::size_t number = 0;
  while (std::getline(is, raw)) {
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.resize(hash);
    std::istringstream ls(raw);
    Line line;
    line.number = number;
    std::string tok;
    while (ls >> tok) line.tokens.push_back(tok);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

Word require_word(const Line& line, const std::string& tok) {
  auto w = parse_word(tok);
  if (!w) throw FormatError(line.number, "malformed number '" + tok + "'");
  return *w;
}

std::string score_text(const Score& score) {
  if (score.pruned) return "-1";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", score.value);
  return buf;
}

}  // namespace

TestInput parse_test_input(const std::string& text) {
  TestInput input;
  bool saw_args = false;
  for (const Line& line : tokenize_lines(text)) {
    const auto& t = line.tokens;
    if (t[0] == "args") {
      if (saw_args) throw FormatError(line.number, "duplicate args line");
      saw_args = true;
      for (std::size_t i = 1; i < t.size(); ++i) input.args.push_back(require_word(line, t[i]));
    } else if (t[0] == "global") {
      if (t.size() != 4 || t[2] != "=") {
        throw FormatError(line.number, "expected 'global <addr> = <value>'");
      }
      Word addr = require_word(line, t[1]);
      if (!input.global_overrides.emplace(addr, require_word(line, t[3])).second) {
        throw FormatError(line.number, "duplicate global override");
      }
    } else if (t[0] == "lib") {
      if (t.size() != 4 || t[2] != "->") {
        throw FormatError(line.number, "expected 'lib <name> -> <value>'");
      }
      input.library_script[t[1]].push_back(require_word(line, t[3]));
    } else {
      throw FormatError(line.number, "unknown directive '" + t[0] + "'");
    }
  }
  return input;
}

std::string render_test_input(const TestInput& input) {
  std::ostringstream os;
  os << "args";
  for (Word w : input.args) os << " " << w;
  os << "\n";
  for (const auto& [addr, value] : input.global_overrides) {
    os << "global " << hex_word(addr) << " = " << value << "\n";
  }
  for (const auto& [name, script] : input.library_script) {
    for (Word w : script) os << "lib " << name << " -> " << hex_word(w) << "\n";
  }
  return os.str();
}

SignatureFile parse_signature_file(const std::string& text) {
  auto lines = tokenize_lines(text);
  if (lines.empty()) throw FormatError(1, "missing bmsig header");
  const Line& header = lines[0];
  if (header.tokens.size() != 3 || header.tokens[0] != "bmsig" || header.tokens[1] != "1") {
    throw FormatError(header.number, "corrupt bmsig header");
  }
  Word count = require_word(header, header.tokens[2]);

  SignatureFile file;
  std::size_t i = 1;
  if (i < lines.size() && lines[i].tokens[0] == "status") {
    if (lines[i].tokens.size() != 2) throw FormatError(lines[i].number, "corrupt status line");
    file.status = lines[i].tokens[1];
    ++i;
  }
  for (; i < lines.size(); ++i) {
    const Line& line = lines[i];
    const auto& t = line.tokens;
    if (t[0] == "ret" && t.size() == 2) {
      file.signature.push(Feature::output_return(require_word(line, t[1])));
    } else if (t[0] == "glob" && t.size() == 3) {
      file.signature.push(
          Feature::output_global(require_word(line, t[1]), require_word(line, t[2])));
    } else if (t[0] == "cmp" && t.size() == 3) {
      file.signature.push(Feature::comparison(require_word(line, t[1]), require_word(line, t[2])));
    } else if (t[0] == "lib" && t.size() == 2) {
      file.signature.push(Feature::lib_call(t[1]));
    } else {
      throw FormatError(line.number, "unknown feature line '" + t[0] + "'");
    }
  }
  if (file.signature.length() != count) {
    throw FormatError(header.number, "feature count does not match header");
  }
  return file;
}

std::string render_signature_file(const SignatureFile& file) {
  std::ostringstream os;
  os << "bmsig 1 " << file.signature.length() << "\n";
  if (file.status != "complete") os << "status " << file.status << "\n";
  for (const Feature& f : file.signature.features) os << feature_to_line(f) << "\n";
  return os.str();
}

namespace {

// Section reader for .bmrec: `<section> <count>` then count entry lines
// whose first token is the entry keyword.
class RecordReader {
 public:
  explicit RecordReader(const std::vector<Line>& lines) : lines_(lines) {}

  const Line& next(const std::string& what) {
    if (pos_ >= lines_.size()) {
      throw FormatError(lines_.empty() ? 1 : lines_.back().number, "missing " + what);
    }
    return lines_[pos_++];
  }

  std::size_t section(const std::string& name) {
    const Line& line = next("section '" + name + "'");
    if (line.tokens.size() != 2 || line.tokens[0] != name) {
      throw FormatError(line.number, "expected section '" + name + "'");
    }
    return require_word(line, line.tokens[1]);
  }

  const Line& entry(const std::string& keyword, std::size_t arity) {
    const Line& line = next("'" + keyword + "' entry");
    if (line.tokens.size() != arity + 1 || line.tokens[0] != keyword) {
      throw FormatError(line.number, "expected '" + keyword + "' entry");
    }
    return line;
  }

  bool done() const { return pos_ >= lines_.size(); }
  std::size_t last_line() const { return lines_.empty() ? 1 : lines_.back().number; }

 private:
  const std::vector<Line>& lines_;
  std::size_t pos_ = 0;
};

}  // namespace

RecordFile parse_record_file(const std::string& text) {
  auto lines = tokenize_lines(text);
  RecordReader r(lines);
  {
    const Line& header = r.next("bmrec header");
    if (header.tokens.size() != 2 || header.tokens[0] != "bmrec" || header.tokens[1] != "1") {
      throw FormatError(header.number, "corrupt bmrec header");
    }
  }
  RecordFile file;
  {
    const Line& fn = r.entry("func", 1);
    file.function = fn.tokens[1];
    const Line& status = r.entry("status", 1);
    file.status = status.tokens[1];
  }
  std::size_t n = r.section("args");
  for (std::size_t i = 0; i < n; ++i) {
    const Line& line = r.entry("arg", 1);
    if (line.tokens[1] == "?") {
      file.record.arg_values.push_back(std::nullopt);
    } else {
      file.record.arg_values.push_back(require_word(line, line.tokens[1]));
    }
  }
  n = r.section("greads");
  for (std::size_t i = 0; i < n; ++i) {
    const Line& line = r.entry("gread", 2);
    file.record.global_reads.push_back(
        {require_word(line, line.tokens[1]), require_word(line, line.tokens[2])});
  }
  n = r.section("icalls");
  for (std::size_t i = 0; i < n; ++i) {
    const Line& line = r.entry("icall", 3);
    file.record.indirect_targets.push_back({require_word(line, line.tokens[1]),
                                            require_word(line, line.tokens[2]),
                                            require_word(line, line.tokens[3])});
  }
  n = r.section("subrets");
  for (std::size_t i = 0; i < n; ++i) {
    const Line& line = r.entry("subret", 2);
    file.record.subroutine_returns.push_back({line.tokens[1], require_word(line, line.tokens[2])});
  }
  n = r.section("librets");
  for (std::size_t i = 0; i < n; ++i) {
    const Line& line = r.entry("libret", 2);
    file.record.library_results.push_back({line.tokens[1], require_word(line, line.tokens[2])});
  }
  if (!r.done()) {
    throw FormatError(r.last_line(), "trailing content after librets section");
  }
  return file;
}

std::string render_record_file(const RecordFile& file) {
  std::ostringstream os;
  os << "bmrec 1\n";
  os << "func " << file.function << "\n";
  os << "status " << file.status << "\n";
  os << "args " << file.record.arg_values.size() << "\n";
  for (const auto& a : file.record.arg_values) {
    os << "arg " << (a ? hex_word(*a) : "?") << "\n";
  }
  os << "greads " << file.record.global_reads.size() << "\n";
  for (const auto& g : file.record.global_reads) {
    os << "gread " << hex_word(g.address) << " " << hex_word(g.value) << "\n";
  }
  os << "icalls " << file.record.indirect_targets.size() << "\n";
  for (const auto& c : file.record.indirect_targets) {
    os << "icall " << c.ordinal << " " << hex_word(c.target_address) << " "
       << hex_word(c.return_value) << "\n";
  }
  os << "subrets " << file.record.subroutine_returns.size() << "\n";
  for (const auto& s : file.record.subroutine_returns) {
    os << "subret " << s.callee << " " << hex_word(s.return_value) << "\n";
  }
  os << "librets " << file.record.library_results.size() << "\n";
  for (const auto& l : file.record.library_results) {
    os << "libret " << l.name << " " << hex_word(l.return_value) << "\n";
  }
  return os.str();
}

MatchConfig parse_match_config(const std::string& text) {
  MatchConfig cfg;
  for (const Line& line : tokenize_lines(text)) {
    const auto& t = line.tokens;
    if (t.size() != 3 || t[1] != "=") {
      throw FormatError(line.number, "expected '<key> = <value>'");
    }
    const std::string& key = t[0];
    const std::string& value = t[2];
    if (key == "P") {
      if (value == "inf") {
        cfg.pruning_threshold = std::numeric_limits<double>::infinity();
      } else {
        try {
          std::size_t used = 0;
          cfg.pruning_threshold = std::stod(value, &used);
          if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
          throw FormatError(line.number, "malformed number '" + value + "'");
        }
      }
      continue;
    }
    Word w = require_word(line, value);
    if (key == "L") {
      cfg.length_threshold = w;
    } else if (key == "F") {
      cfg.simhash_bits = w;
    } else if (key == "K") {
      cfg.report_depth = w;
    } else if (key == "execution_budget") {
      cfg.execution_budget = w;
    } else if (key == "emulation_budget") {
      cfg.emulation_budget = w;
    } else {
      throw FormatError(line.number, "unknown config key '" + key + "'");
    }
  }
  cfg.check();
  return cfg;
}

std::string render_match_config(const MatchConfig& cfg) {
  std::ostringstream os;
  os << "L = " << cfg.length_threshold << "\n";
  if (std::isinf(cfg.pruning_threshold)) {
    os << "P = inf\n";
  } else {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", cfg.pruning_threshold);
    os << "P = " << buf << "\n";
  }
  os << "F = " << cfg.simhash_bits << "\n";
  os << "K = " << cfg.report_depth << "\n";
  os << "execution_budget = " << cfg.execution_budget << "\n";
  os << "emulation_budget = " << cfg.emulation_budget << "\n";
  return os.str();
}

RankedList parse_ranked_list(const std::string& text) {
  auto lines = tokenize_lines(text);
  if (lines.empty()) throw FormatError(1, "missing ref header");
  if (lines[0].tokens.size() != 2 || lines[0].tokens[0] != "ref") {
    throw FormatError(lines[0].number, "corrupt ref header");
  }
  RankedList list;
  list.reference = lines[0].tokens[1];
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Line& line = lines[i];
    const auto& t = line.tokens;
    if (t.size() != 5 || t[0] != "rank") {
      throw FormatError(line.number, "expected 'rank <i> <target> <score> <status>'");
    }
    RankedEntry entry;
    entry.target = t[2];
    if (t[3] == "-1") {
      entry.score = Score::pruned_sentinel();
    } else {
      try {
        std::size_t used = 0;
        entry.score = Score::of(std::stod(t[3], &used));
        if (used != t[3].size()) throw std::invalid_argument(t[3]);
      } catch (const std::exception&) {
        throw FormatError(line.number, "malformed score '" + t[3] + "'");
      }
    }
    entry.status = t[4];
    list.entries.push_back(std::move(entry));
  }
  return list;
}

std::string render_ranked_list(const RankedList& list) {
  std::ostringstream os;
  os << "ref " << list.reference << "\n";
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    const RankedEntry& e = list.entries[i];
    os << "rank " << (i + 1) << " " << e.target << " " << score_text(e.score) << " " << e.status
       << "\n";
  }
  return os.str();
}

std::vector<ManifestRow> parse_manifest(const std::string& text) {
  std::vector<ManifestRow> rows;
  for (const Line& line : tokenize_lines(text)) {
    if (line.tokens.size() != 5) {
      throw FormatError(line.number,
                        "expected '<ref.bmir> <fn> <input.bmin> <target.bmir> <expected>'");
    }
    rows.push_back(
        {line.tokens[0], line.tokens[1], line.tokens[2], line.tokens[3], line.tokens[4]});
  }
  return rows;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

}  // namespace bmatch
