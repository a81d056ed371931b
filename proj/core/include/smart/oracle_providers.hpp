#ifndef SMART_ORACLE_PROVIDERS_HPP
#define SMART_ORACLE_PROVIDERS_HPP

#include <memory>
#include <string>

#include "smart/dataset.hpp"
#include "smart/llm.hpp"

namespace smart::llm {

// Bench-backed test doubles for fully offline evaluation runs. Scripted
// stubs cover forge stages whose tags are known ahead of time; augmented
// instances have RNG-dependent content, so candidate/judge doubles answer
// from the bench record named in the request tag ("<stage>:<id>").
enum class OracleProfile {
  Perfect,     // correct on every dimension
  Lucky,       // correct final answers, degenerate SMT, no fault detection
  AllClear,    // correct everywhere except "no errors" on every reflection task
};

OracleProfile parse_oracle_profile(const std::string& name);

class OracleCandidateProvider : public ChatProvider {
 public:
  OracleCandidateProvider(std::shared_ptr<const BenchFile> bench, OracleProfile profile);

  ChatResponse complete(const ChatRequest& req) override;
  std::string id() const override;

 private:
  std::shared_ptr<const BenchFile> bench_;
  OracleProfile profile_;
};

class OracleJudgeProvider : public ChatProvider {
 public:
  explicit OracleJudgeProvider(std::shared_ptr<const BenchFile> bench);

  ChatResponse complete(const ChatRequest& req) override;
  std::string id() const override { return "oracle-judge"; }

 private:
  std::shared_ptr<const BenchFile> bench_;
};

// Renders a ContextTemplate in the labeled-section exchange format.
std::string render_context_template(const ContextTemplate& t);

}  // namespace smart::llm

#endif
