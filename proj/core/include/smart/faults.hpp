#ifndef SMART_FAULTS_HPP
#define SMART_FAULTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace smart::faults {

enum class FaultType {
  ArithmeticNumber,
  SkippedStep,
  HallucinatoryInjection,
  LogicalOrder,
  RedundantOutput,
  IncorrectOperator,
};

inline constexpr size_t kFaultTypeCount = 6;

// The exact names evaluated models are told to answer with.
std::string canonical_fault_name(FaultType t);

// Case-insensitive; tolerates a missing/extra " error" suffix and surrounding
// whitespace. Returns nullopt for anything else.
std::optional<FaultType> parse_fault_name(std::string_view name);

struct FaultRecord {
  FaultType type;
  int order;  // 1-based position in the post-edit CoT

  bool operator==(const FaultRecord&) const = default;
  bool operator<(const FaultRecord& o) const {
    return order != o.order ? order < o.order : static_cast<int>(type) < static_cast<int>(o.type);
  }
};

struct FaultRecordSet {
  std::vector<FaultRecord> records;  // sorted by order
  uint64_t rng_seed = 0;
};

// Exact set match: every ground-truth fault identified with its exact order,
// no extras, no misses. Type names canonicalized, orders compared exactly.
// Unparsable predictions never match.
bool match_reflection(const std::vector<std::pair<std::string, int>>& predicted,
                      const FaultRecordSet& ground_truth);

// Supplementary partial-credit score in [0,1]: |pred ∩ gt| / max(|pred|,|gt|).
// Never feeds the strict reflection accuracy.
double reflection_overlap(const std::vector<std::pair<std::string, int>>& predicted,
                          const FaultRecordSet& ground_truth);

}  // namespace smart::faults

#endif
