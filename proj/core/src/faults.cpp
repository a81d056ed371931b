#include "smart/faults.hpp"

#include <algorithm>
#include <set>

#include "smart/text.hpp"

namespace smart::faults {

std::string canonical_fault_name(FaultType t) {
  switch (t) {
    case FaultType::ArithmeticNumber: return "arithmetic number error";
    case FaultType::SkippedStep: return "skipped step error";
    case FaultType::HallucinatoryInjection: return "hallucinatory injection error";
    case FaultType::LogicalOrder: return "logical order error";
    case FaultType::RedundantOutput: return "redundant output error";
    case FaultType::IncorrectOperator: return "incorrect operator error";
  }
  return "?";
}

std::optional<FaultType> parse_fault_name(std::string_view name) {
  std::string n = to_lower(trim(name));
  if (n.size() >= 6 && n.substr(n.size() - 6) == " error") n = n.substr(0, n.size() - 6);
  // Collapse internal whitespace runs.
  std::string collapsed;
  bool prev_space = false;
  for (char c : n) {
    bool space = c == ' ' || c == '\t';
    if (space && prev_space) continue;
    collapsed += space ? ' ' : c;
    prev_space = space;
  }
  static const std::pair<const char*, FaultType> table[] = {
      {"arithmetic number", FaultType::ArithmeticNumber},
      {"skipped step", FaultType::SkippedStep},
      {"hallucinatory injection", FaultType::HallucinatoryInjection},
      {"logical order", FaultType::LogicalOrder},
      {"redundant output", FaultType::RedundantOutput},
      {"incorrect operator", FaultType::IncorrectOperator},
  };
  for (const auto& [key, type] : table) {
    if (collapsed == key) return type;
  }
  return std::nullopt;
}

namespace {

std::optional<std::multiset<FaultRecord>> canonical_prediction(
    const std::vector<std::pair<std::string, int>>& predicted) {
  std::multiset<FaultRecord> out;
  for (const auto& [name, order] : predicted) {
    auto type = parse_fault_name(name);
    if (!type) return std::nullopt;
    out.insert(FaultRecord{*type, order});
  }
  return out;
}

}  // namespace

bool match_reflection(const std::vector<std::pair<std::string, int>>& predicted,
                      const FaultRecordSet& ground_truth) {
  auto pred = canonical_prediction(predicted);
  if (!pred) return false;
  std::multiset<FaultRecord> gt(ground_truth.records.begin(), ground_truth.records.end());
  return *pred == gt;
}

double reflection_overlap(const std::vector<std::pair<std::string, int>>& predicted,
                          const FaultRecordSet& ground_truth) {
  auto pred = canonical_prediction(predicted);
  if (!pred || ground_truth.records.empty()) return 0.0;
  std::multiset<FaultRecord> gt(ground_truth.records.begin(), ground_truth.records.end());
  size_t hits = 0;
  for (const auto& r : gt) {
    auto it = pred->find(r);
    if (it != pred->end()) {
      pred->erase(it);
      ++hits;
    }
  }
  size_t denom = std::max(predicted.size(), ground_truth.records.size());
  return denom == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(denom);
}

}  // namespace smart::faults
