#ifndef SMART_OFFLINE_HPP
#define SMART_OFFLINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "smart/model.hpp"
#include "smart/smtlib.hpp"

namespace smart::offline {

// Mechanically builds an SMT evaluation chain from a seed's CoT equations by
// matching each operand against earlier stated results (value flow). Used to
// synthesize forge stub scripts for fully offline runs and test fixtures.
std::optional<smtlib::SmtProgram> chain_from_cot(const SeedProblem& seed);

// Deterministic textual context extraction for stub fixtures: first sentence
// as scenario, the question sentence as goal, number-bearing sentences as
// known quantities, number-free declaratives as irrelevant information.
ContextTemplate heuristic_context(const SeedProblem& seed);

// Writes the scripted-responses JSONL covering forge_smt / forge_context /
// forge_arith for every seed.
void write_forge_stub(const std::string& path, const std::vector<SeedProblem>& seeds);

}  // namespace smart::offline

#endif
