#ifndef SMART_TEXT_HPP
#define SMART_TEXT_HPP

#include <string>
#include <string_view>
#include <vector>

namespace smart {

// Sentence segmentation on ./!/? boundaries; keeps terminal punctuation.
std::vector<std::string> split_sentences(std::string_view text);

std::string join_sentences(const std::vector<std::string>& sentences);

// All numeric tokens ("12", "3.5", "1,200" normalized to "1200").
std::vector<std::string> number_tokens(std::string_view text);

// Capitalized words that are not sentence-initial (entity heuristic).
std::vector<std::string> capitalized_entities(std::string_view text);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

bool starts_with_ci(std::string_view s, std::string_view prefix);

std::vector<std::string> split_lines(std::string_view text);

}  // namespace smart

#endif
