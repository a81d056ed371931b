#ifndef SMART_PROMPT_HPP
#define SMART_PROMPT_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace smart::llm {

struct PromptError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

// Template text with {named} slots. The {exemplars} slot receives the k-shot
// blocks; every other slot must be provided by the caller.
struct PromptTemplate {
  std::string name;
  std::string text;
  std::vector<std::string> exemplars;  // preformatted blocks, fixed order
};

// Fills slots and prepends the first `shots` exemplar blocks (fixed order,
// deterministic). shots == 0 renders the bare task. Throws PromptError when a
// slot has no value or the exemplar pool is smaller than `shots`.
std::vector<ChatMessage> render_prompt(const PromptTemplate& t,
                                       const std::map<std::string, std::string>& slots, size_t shots);

// Named template lookup. Built-in defaults cover every pipeline stage; a
// config-specified directory of <name>.txt / <name>.exemplars.txt files
// overrides them (exemplar blocks separated by lines containing only "---").
class PromptLibrary {
 public:
  PromptLibrary();  // built-in defaults

  void load_directory(const std::string& dir);  // overrides by template name

  const PromptTemplate& get(const std::string& name) const;
  bool has(const std::string& name) const { return templates_.count(name) > 0; }

 private:
  std::map<std::string, PromptTemplate> templates_;
};

}  // namespace smart::llm

#endif
