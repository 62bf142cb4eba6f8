#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace dataprog::text {

// Unicode simple case folding of UTF-8 text for the Latin, Greek and Cyrillic
// blocks. Bytes that are not valid UTF-8 pass through unchanged.
std::string fold_case(std::string_view utf8);

bool contains(std::string_view haystack, std::string_view needle);

// Non-overlapping occurrences, scanning left to right.
std::size_t count_occurrences(std::string_view haystack, std::string_view needle);

// First whitespace-delimited token, or empty.
std::string_view first_token(std::string_view s);

std::string_view trim(std::string_view s);

}  // namespace dataprog::text
