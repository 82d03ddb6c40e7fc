#pragma once

// Small UTF-8 aware string helpers shared by the feature extractor and the
// reference grouper.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace reflines::text {

std::string_view trim(std::string_view s);

/// ASCII lower-casing; bytes >= 0x80 pass through unchanged.
std::string to_lower(std::string_view s);

/// Number of code points, counting each malformed byte as one.
std::size_t codepoint_count(std::string_view s);

std::vector<std::string_view> split_whitespace(std::string_view s);

enum class LetterCase { None, Upper, Lower };

/// Case of the first letter in `s` (ASCII plus Latin-1 supplement letters).
/// Returns LetterCase::None when `s` contains no recognised letter.
LetterCase first_letter_case(std::string_view s);

/// True when the token contains at least one recognised letter.
bool has_letter(std::string_view s);

}  // namespace reflines::text
