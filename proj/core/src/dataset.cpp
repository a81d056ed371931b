#include "smart/dataset.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "smart/text.hpp"

namespace smart {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path);
  f << content;
  if (!f) throw IoError("write failed: " + path);
}

SeedLoadResult load_seeds(const std::string& path) {
  SeedLoadResult result;
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);

  std::string line;
  size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      result.rejects.push_back({line_no, "", std::string("malformed JSON: ") + e.what()});
      continue;
    }
    SeedProblem seed;
    try {
      seed = j.get<SeedProblem>();
    } catch (const NumberError& e) {
      result.rejects.push_back({line_no, j.value("id", ""), std::string("invalid rational: ") + e.what()});
      continue;
    } catch (const std::exception& e) {
      result.rejects.push_back({line_no, j.value("id", ""), std::string("schema violation: ") + e.what()});
      continue;
    }
    auto violations = seed_violations(seed);
    if (!violations.empty()) {
      std::string reason;
      for (const auto& v : violations) {
        if (!reason.empty()) reason += "; ";
        reason += v;
      }
      result.rejects.push_back({line_no, seed.id, reason});
      continue;
    }
    result.seeds.push_back(std::move(seed));
  }
  return result;
}

void save_seeds(const std::string& path, const std::vector<SeedProblem>& seeds) {
  std::string out;
  for (const auto& s : seeds) {
    out += json(s).dump();
    out += '\n';
  }
  write_file(path, out);
}

void from_json(const json& j, MultipleChoiceRecord& r) {
  j.at("id").get_to(r.id);
  j.at("source").get_to(r.source);
  j.at("question").get_to(r.question);
  j.at("options").get_to(r.options);
  j.at("correct").get_to(r.correct);
  if (j.contains("cot")) j.at("cot").get_to(r.cot);
  r.reasoning_step_count = j.value("reasoning_step_count", 0);
}

namespace {

// "(C) 42" / "C) 42" / "C. 42" / "42" -> "42"
std::string strip_option_label(const std::string& option, const std::string& key) {
  std::string s = trim(option);
  if (s.empty()) return s;
  size_t i = 0;
  if (s[i] == '(') ++i;
  if (i < s.size() && to_lower(std::string(1, s[i])) == to_lower(key)) {
    size_t j = i + 1;
    if (j < s.size() && (s[j] == ')' || s[j] == '.' || s[j] == ':')) {
      return trim(s.substr(j + 1));
    }
  }
  return s;
}

std::optional<ExactNumber> parse_option_number(const std::string& text) {
  std::string t = trim(text);
  // Tolerate "$42", "42%", "42 km", trailing punctuation.
  if (!t.empty() && (t[0] == '$')) t = trim(t.substr(1));
  while (!t.empty() && (t.back() == '.' || t.back() == '%')) t.pop_back();
  if (auto v = ExactNumber::try_parse(t)) return v;
  // Numeric head followed by units ("42 km"): take the leading token.
  size_t i = 0;
  if (i < t.size() && (t[i] == '-' || t[i] == '+')) ++i;
  size_t start = i;
  while (i < t.size() && (std::isdigit(static_cast<unsigned char>(t[i])) || t[i] == '.' || t[i] == '/')) ++i;
  if (i > start && (i == t.size() || t[i] == ' ')) {
    return ExactNumber::try_parse(t.substr(0, i));
  }
  return std::nullopt;
}

}  // namespace

std::optional<SeedProblem> to_open_ended(const MultipleChoiceRecord& record, std::string* reason) {
  const std::string* chosen = nullptr;
  for (const auto& opt : record.options) {
    std::string stripped = strip_option_label(opt, record.correct);
    if (stripped != trim(opt) || record.options.size() == 1) {
      chosen = &opt;
      break;
    }
  }
  if (!chosen) {
    if (reason) *reason = "correct option '" + record.correct + "' not found";
    return std::nullopt;
  }
  auto value = parse_option_number(strip_option_label(*chosen, record.correct));
  if (!value) {
    if (reason) *reason = "correct option is non-numeric: '" + *chosen + "'";
    return std::nullopt;
  }

  SeedProblem seed;
  seed.id = record.id;
  seed.source = record.source;
  seed.question = record.question;
  // Drop an embedded options block when the question carries one.
  size_t opt_pos = seed.question.find("Options:");
  if (opt_pos == std::string::npos) opt_pos = seed.question.find("Answer Choices:");
  if (opt_pos != std::string::npos) seed.question = trim(seed.question.substr(0, opt_pos));
  seed.answer = *value;
  seed.cot = record.cot;
  seed.reasoning_step_count =
      record.reasoning_step_count > 0 ? record.reasoning_step_count : static_cast<int>(record.cot.size());
  return seed;
}

namespace {

json manifest_to_json(const BenchManifest& m) {
  return json{{"type", "manifest"},
              {"schema_version", m.schema_version},
              {"generated_at", m.generated_at},
              {"global_seed", m.global_seed},
              {"config_hash", m.config_hash},
              {"seed_count", m.seed_count},
              {"instance_count", m.instance_count},
              {"reject_count", m.reject_count}};
}

BenchManifest manifest_from_json(const json& j) {
  BenchManifest m;
  m.schema_version = j.at("schema_version").get<int>();
  m.generated_at = j.value("generated_at", "");
  m.global_seed = j.value("global_seed", 0ULL);
  m.config_hash = j.value("config_hash", "");
  m.seed_count = j.value("seed_count", 0ULL);
  m.instance_count = j.value("instance_count", 0ULL);
  m.reject_count = j.value("reject_count", 0ULL);
  return m;
}

}  // namespace

void save_bench(const std::string& path, const BenchFile& bench) {
  BenchManifest m = bench.manifest;
  m.seed_count = bench.seeds.size();
  m.instance_count = bench.instances.size();
  m.reject_count = bench.rejects.size();

  std::string out = manifest_to_json(m).dump() + "\n";
  for (const auto& s : bench.seeds) {
    json j = s;
    j["type"] = "seed";
    out += j.dump() + "\n";
  }
  for (const auto& inst : bench.instances) {
    json j = inst;
    j["type"] = "instance";
    out += j.dump() + "\n";
  }
  for (const auto& r : bench.rejects) {
    out += json{{"type", "reject"}, {"id", r.id}, {"line", r.line}, {"reason", r.reason}}.dump() + "\n";
  }
  write_file(path, out);
}

BenchFile load_bench(const std::string& path) {
  BenchFile bench;
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  std::string line;
  size_t line_no = 0;
  bool have_manifest = false;
  while (std::getline(f, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw IoError(path + ":" + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    std::string type = j.value("type", "");
    if (type == "manifest") {
      bench.manifest = manifest_from_json(j);
      have_manifest = true;
    } else if (type == "seed") {
      bench.seeds.push_back(j.get<SeedProblem>());
    } else if (type == "instance") {
      bench.instances.push_back(j.get<DimensionInstance>());
    } else if (type == "reject") {
      bench.rejects.push_back({j.value("line", 0ULL), j.value("id", ""), j.value("reason", "")});
    } else {
      throw IoError(path + ":" + std::to_string(line_no) + ": unknown record type '" + type + "'");
    }
  }
  if (!have_manifest) throw IoError(path + ": missing manifest line");
  return bench;
}

}  // namespace smart
