#include "smart/prompt.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "smart/text.hpp"

namespace smart::llm {

namespace fs = std::filesystem;

std::vector<ChatMessage> render_prompt(const PromptTemplate& t,
                                       const std::map<std::string, std::string>& slots, size_t shots) {
  if (shots > t.exemplars.size()) {
    throw PromptError("template '" + t.name + "' has " + std::to_string(t.exemplars.size()) +
                      " exemplars, " + std::to_string(shots) + " requested");
  }
  std::string blocks;
  for (size_t i = 0; i < shots; ++i) {
    if (i) blocks += "\n\n";
    blocks += t.exemplars[i];
  }

  std::string out;
  out.reserve(t.text.size() + blocks.size());
  for (size_t i = 0; i < t.text.size();) {
    char c = t.text[i];
    if (c == '{') {
      size_t close = t.text.find('}', i);
      if (close == std::string::npos) throw PromptError("template '" + t.name + "': unterminated slot");
      std::string slot = t.text.substr(i + 1, close - i - 1);
      if (slot == "exemplars") {
        out += blocks;
      } else {
        auto it = slots.find(slot);
        if (it == slots.end())
          throw PromptError("template '" + t.name + "': missing slot '" + slot + "'");
        out += it->second;
      }
      i = close + 1;
    } else {
      out += c;
      ++i;
    }
  }
  // Shotless renders would otherwise keep a stray blank region.
  while (out.find("\n\n\n") != std::string::npos) {
    out.replace(out.find("\n\n\n"), 3, "\n\n");
  }
  return {ChatMessage{"user", out}};
}

namespace {

PromptTemplate make(const char* name, const char* text, std::vector<std::string> exemplars) {
  PromptTemplate t;
  t.name = name;
  t.text = text;
  t.exemplars = std::move(exemplars);
  return t;
}

const char* kFormalizeText =
    "Translate the math word problem into an SMT-LIB program.\n"
    "Rules:\n"
    "- Declare every quantity with (declare-const <name> Int) or (declare-const <name> Real).\n"
    "- The quantity to solve for must be a constant named goal.\n"
    "- Use only the operators + - * / div mod and the comparisons = < <= > >=.\n"
    "- Encode the reasoning as equations; do not precompute the answer.\n"
    "- End with (check-sat) and (get-value (goal)).\n"
    "- Output only the SMT-LIB program.\n"
    "\n"
    "{exemplars}\n"
    "\n"
    "Problem: {question}\n"
    "{feedback}"
    "Program:\n";

const char* kFormalizeEx1 =
    "Problem: A tray holds 6 rows of 4 cookies. How many cookies are on 2 trays?\n"
    "Program:\n"
    "(declare-const per_tray Int)\n"
    "(declare-const goal Int)\n"
    "(assert (= per_tray (* 6 4)))\n"
    "(assert (= goal (* per_tray 2)))\n"
    "(check-sat)\n"
    "(get-value (goal))";

const char* kFormalizeEx2 =
    "Problem: Mia had 45 stickers, gave away 12, then bought 5 more. How many does she have now?\n"
    "Program:\n"
    "(declare-const after_giving Int)\n"
    "(declare-const goal Int)\n"
    "(assert (= after_giving (- 45 12)))\n"
    "(assert (= goal (+ after_giving 5)))\n"
    "(check-sat)\n"
    "(get-value (goal))";

const char* kFormalizeEx3 =
    "Problem: A 9.6 meter rope is cut into 4 equal pieces. How long is each piece?\n"
    "Program:\n"
    "(declare-const goal Real)\n"
    "(assert (= goal (/ 9.6 4)))\n"
    "(check-sat)\n"
    "(get-value (goal))";

const char* kContextText =
    "Extract the context of the math problem into the template below. Copy the\n"
    "wording from the problem where possible. Write one item per line after each\n"
    "heading; write (none) when a category is empty.\n"
    "\n"
    "Problem Scenario:\n"
    "Goal:\n"
    "Known Quantities:\n"
    "Unknown Quantities:\n"
    "Relationships and Constraints:\n"
    "Irrelevant Information:\n"
    "\n"
    "{exemplars}\n"
    "\n"
    "Problem: {question}\n"
    "Context:\n";

const char* kContextEx1 =
    "Problem: A tray holds 6 rows of 4 cookies. Lena is 26 years old. How many cookies are on 2 trays?\n"
    "Context:\n"
    "Problem Scenario: Cookies are arranged on trays in rows.\n"
    "Goal: Find how many cookies are on 2 trays.\n"
    "Known Quantities:\n"
    "- 6 rows per tray\n"
    "- 4 cookies per row\n"
    "- 2 trays\n"
    "Unknown Quantities:\n"
    "- total number of cookies on 2 trays\n"
    "Relationships and Constraints:\n"
    "- cookies per tray = rows per tray times cookies per row\n"
    "- total = cookies per tray times number of trays\n"
    "Irrelevant Information:\n"
    "- Lena is 26 years old.";

const char* kContextEx2 =
    "Problem: Mia had 45 stickers and gave away 12. How many are left?\n"
    "Context:\n"
    "Problem Scenario: Mia gives away part of her sticker collection.\n"
    "Goal: Find how many stickers Mia has left.\n"
    "Known Quantities:\n"
    "- 45 stickers at the start\n"
    "- 12 stickers given away\n"
    "Unknown Quantities:\n"
    "- stickers remaining\n"
    "Relationships and Constraints:\n"
    "- remaining = starting stickers minus stickers given away\n"
    "Irrelevant Information:\n"
    "(none)";

const char* kContextEx3 =
    "Problem: A train travels 80 km in 2 hours. The conductor's hat is blue. What is its average speed?\n"
    "Context:\n"
    "Problem Scenario: A train covers a distance over a period of time.\n"
    "Goal: Find the train's average speed.\n"
    "Known Quantities:\n"
    "- 80 km traveled\n"
    "- 2 hours elapsed\n"
    "Unknown Quantities:\n"
    "- average speed\n"
    "Relationships and Constraints:\n"
    "- speed = distance divided by time\n"
    "Irrelevant Information:\n"
    "- The conductor's hat is blue.";

const char* kSmtToArithText =
    "Rewrite the SMT-LIB program as a plain arithmetic calculation task. Use one\n"
    "assignment per line in evaluation order, with only numbers, previously\n"
    "defined variables, and the operators + - * / mod. The final line must\n"
    "assign the variable goal. Output only the assignments.\n"
    "\n"
    "{exemplars}\n"
    "\n"
    "SMT-LIB:\n{smt}\n"
    "{feedback}"
    "Arithmetic task:\n";

const char* kSmtToArithEx1 =
    "SMT-LIB:\n"
    "(declare-const per_tray Int)\n"
    "(declare-const goal Int)\n"
    "(assert (= per_tray (* 6 4)))\n"
    "(assert (= goal (* per_tray 2)))\n"
    "(check-sat)\n"
    "(get-value (goal))\n"
    "Arithmetic task:\n"
    "per_tray = 6 * 4\n"
    "goal = per_tray * 2";

const char* kSmtToArithEx2 =
    "SMT-LIB:\n"
    "(declare-const goal Real)\n"
    "(assert (= goal (/ 9.6 4)))\n"
    "(check-sat)\n"
    "(get-value (goal))\n"
    "Arithmetic task:\n"
    "goal = 9.6 / 4";

const char* kSmtToArithEx3 =
    "SMT-LIB:\n"
    "(declare-const after_giving Int)\n"
    "(declare-const goal Int)\n"
    "(assert (= after_giving (- 45 12)))\n"
    "(assert (= goal (+ after_giving 5)))\n"
    "(check-sat)\n"
    "(get-value (goal))\n"
    "Arithmetic task:\n"
    "after_giving = 45 - 12\n"
    "goal = after_giving + 5";

const char* kSolveFinalText =
    "Solve the math problem. Think step by step, then give the result on the\n"
    "last line in exactly this form:\n"
    "Final Answer: <number>\n"
    "\n"
    "{exemplars}\n"
    "\n"
    "Problem: {question}\n";

const char* kSolveFinalEx1 =
    "Problem: A tray holds 6 rows of 4 cookies. How many cookies are on 2 trays?\n"
    "Each tray holds 6 * 4 = 24 cookies, so 2 trays hold 24 * 2 = 48.\n"
    "Final Answer: 48";

const char* kSolveFinalEx2 =
    "Problem: Mia had 45 stickers, gave away 12, then bought 5 more. How many does she have now?\n"
    "After giving some away she has 45 - 12 = 33, and buying more gives 33 + 5 = 38.\n"
    "Final Answer: 38";

const char* kSolveFinalEx3 =
    "Problem: A 9.6 meter rope is cut into 4 equal pieces. How long is each piece?\n"
    "Each piece is 9.6 / 4 = 2.4 meters long.\n"
    "Final Answer: 2.4";

const char* kSolveArithText =
    "Evaluate the calculation task. Work through the assignments in order, then\n"
    "give the value of goal on the last line in exactly this form:\n"
    "Final Answer: <number>\n"
    "\n"
    "{exemplars}\n"
    "\n"
    "Task:\n{problem}\n";

const char* kSolveArithEx1 =
    "Task:\n"
    "per_tray = 6 * 4\n"
    "goal = per_tray * 2\n"
    "per_tray is 24 and goal is 24 * 2 = 48.\n"
    "Final Answer: 48";

const char* kSolveArithEx2 =
    "Task:\n"
    "goal = 9.6 / 4\n"
    "goal is 9.6 / 4 = 2.4.\n"
    "Final Answer: 2.4";

const char* kSolveArithEx3 =
    "Task:\n"
    "after_giving = 45 - 12\n"
    "goal = after_giving + 5\n"
    "after_giving is 33, so goal is 33 + 5 = 38.\n"
    "Final Answer: 38";

const char* kDetectText =
    "The step-by-step solution below contains exactly {count} deliberately\n"
    "introduced error(s). The possible error types are:\n"
    "arithmetic number error, skipped step error, hallucinatory injection error,\n"
    "logical order error, redundant output error, incorrect operator error.\n"
    "\n"
    "Identify every introduced error. Answer with one line per error, in exactly\n"
    "this form and nothing else:\n"
    "<error type> at step <step number>\n"
    "If you believe there are no errors, answer exactly: no errors\n"
    "\n"
    "{exemplars}\n"
    "\n"
    "Problem: {question}\n"
    "Solution:\n{cot}\n"
    "Errors:\n";

const char* kDetectEx1 =
    "Problem: A tray holds 6 rows of 4 cookies. How many cookies are on 2 trays?\n"
    "Solution:\n"
    "Step 1: Each tray holds 6 * 4 = 25 cookies.\n"
    "Step 2: Two trays hold 25 * 2 = 50 cookies.\n"
    "Errors:\n"
    "arithmetic number error at step 1";

const char* kDetectEx2 =
    "Problem: Mia had 45 stickers, gave away 12, then bought 5 more. How many does she have now?\n"
    "Solution:\n"
    "Step 1: After giving stickers away Mia has 45 + 12 = 33 stickers.\n"
    "Step 2: After buying more she has 33 + 5 = 38 stickers.\n"
    "Errors:\n"
    "incorrect operator error at step 1";

const char* kDetectEx3 =
    "Problem: A train travels 80 km in 2 hours. What is its average speed?\n"
    "Solution:\n"
    "Step 1: The speed is 80 / 2 = 40 km per hour.\n"
    "Step 2: To recap, the speed is 80 / 2 = 40 km per hour.\n"
    "Errors:\n"
    "redundant output error at step 2";

const char* kCorrectText =
    "The step-by-step solution below contains deliberately introduced errors.\n"
    "Rewrite it as a corrected solution. Keep the numbered step format\n"
    "(\"Step 1: ...\"), include the arithmetic in each step, and output only the\n"
    "corrected steps.\n"
    "\n"
    "{exemplars}\n"
    "\n"
    "Problem: {question}\n"
    "Solution:\n{cot}\n"
    "Corrected solution:\n";

const char* kCorrectEx1 =
    "Problem: A tray holds 6 rows of 4 cookies. How many cookies are on 2 trays?\n"
    "Solution:\n"
    "Step 1: Each tray holds 6 * 4 = 25 cookies.\n"
    "Step 2: Two trays hold 25 * 2 = 50 cookies.\n"
    "Corrected solution:\n"
    "Step 1: Each tray holds 6 * 4 = 24 cookies.\n"
    "Step 2: Two trays hold 24 * 2 = 48 cookies.";

const char* kCorrectEx2 =
    "Problem: Mia had 45 stickers, gave away 12, then bought 5 more. How many does she have now?\n"
    "Solution:\n"
    "Step 1: After giving stickers away Mia has 45 + 12 = 33 stickers.\n"
    "Step 2: After buying more she has 33 + 5 = 38 stickers.\n"
    "Corrected solution:\n"
    "Step 1: After giving stickers away Mia has 45 - 12 = 33 stickers.\n"
    "Step 2: After buying more she has 33 + 5 = 38 stickers.";

const char* kCorrectEx3 =
    "Problem: A train travels 80 km in 2 hours. What is its average speed?\n"
    "Solution:\n"
    "Step 1: The trip takes 2 hours.\n"
    "Step 2: The speed is 80 * 2 = 160 km per hour.\n"
    "Corrected solution:\n"
    "Step 1: The trip takes 2 hours.\n"
    "Step 2: The speed is 80 / 2 = 40 km per hour.";

const char* kRefineText =
    "Derive the final answer of the problem from the corrected solution below.\n"
    "Follow the solution's arithmetic; do not solve the problem independently.\n"
    "Give the result on the last line in exactly this form:\n"
    "Final Answer: <number>\n"
    "\n"
    "{exemplars}\n"
    "\n"
    "Problem: {question}\n"
    "Corrected solution:\n{cot}\n";

const char* kRefineEx1 =
    "Problem: A tray holds 6 rows of 4 cookies. How many cookies are on 2 trays?\n"
    "Corrected solution:\n"
    "Step 1: Each tray holds 6 * 4 = 24 cookies.\n"
    "Step 2: Two trays hold 24 * 2 = 48 cookies.\n"
    "The final step gives 48.\n"
    "Final Answer: 48";

const char* kRefineEx2 =
    "Problem: Mia had 45 stickers, gave away 12, then bought 5 more. How many does she have now?\n"
    "Corrected solution:\n"
    "Step 1: After giving stickers away Mia has 45 - 12 = 33 stickers.\n"
    "Step 2: After buying more she has 33 + 5 = 38 stickers.\n"
    "The final step gives 38.\n"
    "Final Answer: 38";

const char* kRefineEx3 =
    "Problem: A train travels 80 km in 2 hours. What is its average speed?\n"
    "Corrected solution:\n"
    "Step 1: The speed is 80 / 2 = 40 km per hour.\n"
    "The final step gives 40.\n"
    "Final Answer: 40";

const char* kJudgeText =
    "Rate the semantic similarity between the reference context extraction and\n"
    "the candidate context extraction for the same math problem. Consider every\n"
    "category of the template. Answer with a single integer score from 1 to 100\n"
    "on the last line in exactly this form:\n"
    "Score: <number>\n"
    "\n"
    "{exemplars}\n"
    "\n"
    "Problem: {question}\n"
    "Reference:\n{reference}\n"
    "Candidate:\n{candidate}\n";

const char* kJudgeEx1 =
    "Problem: Mia had 45 stickers and gave away 12. How many are left?\n"
    "Reference:\n"
    "Goal: Find how many stickers Mia has left.\n"
    "Candidate:\n"
    "Goal: Work out the number of stickers Mia still has.\n"
    "The candidate states the same goal in different words.\n"
    "Score: 96";

const char* kJudgeEx2 =
    "Problem: A tray holds 6 rows of 4 cookies. How many cookies are on 2 trays?\n"
    "Reference:\n"
    "Known Quantities: 6 rows per tray; 4 cookies per row; 2 trays\n"
    "Candidate:\n"
    "Known Quantities: 6 rows per tray\n"
    "The candidate misses two known quantities.\n"
    "Score: 55";

const char* kJudgeEx3 =
    "Problem: A train travels 80 km in 2 hours. What is its average speed?\n"
    "Reference:\n"
    "Goal: Find the train's average speed.\n"
    "Candidate:\n"
    "Goal: Find the color of the conductor's hat.\n"
    "The candidate misstates the goal entirely.\n"
    "Score: 8";

}  // namespace

PromptLibrary::PromptLibrary() {
  auto add = [this](PromptTemplate t) { templates_[t.name] = std::move(t); };
  add(make("formalize_smt", kFormalizeText, {kFormalizeEx1, kFormalizeEx2, kFormalizeEx3}));
  add(make("extract_context", kContextText, {kContextEx1, kContextEx2, kContextEx3}));
  add(make("smt_to_arith", kSmtToArithText, {kSmtToArithEx1, kSmtToArithEx2, kSmtToArithEx3}));
  add(make("solve_final", kSolveFinalText, {kSolveFinalEx1, kSolveFinalEx2, kSolveFinalEx3}));
  add(make("solve_arith", kSolveArithText, {kSolveArithEx1, kSolveArithEx2, kSolveArithEx3}));
  add(make("detect_faults", kDetectText, {kDetectEx1, kDetectEx2, kDetectEx3}));
  add(make("correct_cot", kCorrectText, {kCorrectEx1, kCorrectEx2, kCorrectEx3}));
  add(make("refine_answer", kRefineText, {kRefineEx1, kRefineEx2, kRefineEx3}));
  add(make("judge_understanding", kJudgeText, {kJudgeEx1, kJudgeEx2, kJudgeEx3}));
}

void PromptLibrary::load_directory(const std::string& dir) {
  if (!fs::is_directory(dir)) throw PromptError("prompt directory not found: " + dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    fs::path p = entry.path();
    if (p.extension() != ".txt") continue;
    std::string stem = p.stem().string();
    if (stem.size() > 10 && stem.substr(stem.size() - 10) == ".exemplars") continue;

    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    PromptTemplate t;
    t.name = stem;
    t.text = ss.str();

    fs::path ex_path = p.parent_path() / (stem + ".exemplars.txt");
    if (fs::exists(ex_path)) {
      std::ifstream ef(ex_path);
      std::string line, block;
      while (std::getline(ef, line)) {
        if (trim(line) == "---") {
          if (!trim(block).empty()) t.exemplars.push_back(trim(block));
          block.clear();
        } else {
          block += line + "\n";
        }
      }
      if (!trim(block).empty()) t.exemplars.push_back(trim(block));
    } else if (templates_.count(stem)) {
      t.exemplars = templates_[stem].exemplars;  // keep defaults when only the text is overridden
    }
    templates_[t.name] = std::move(t);
  }
}

const PromptTemplate& PromptLibrary::get(const std::string& name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw PromptError("unknown prompt template '" + name + "'");
  return it->second;
}

}  // namespace smart::llm
