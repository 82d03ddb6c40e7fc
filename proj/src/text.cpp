#include "reflines/text.hpp"

#include <cstdint>

namespace reflines::text {
namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

// Decodes one code point starting at s[i]; advances i. Malformed input
// yields the raw byte value.
std::uint32_t decode(std::string_view s, std::size_t& i) {
  auto c = static_cast<unsigned char>(s[i]);
  int extra = 0;
  std::uint32_t cp = c;
  if (c >= 0xF0 && c < 0xF8) {
    extra = 3;
    cp = c & 0x07;
  } else if (c >= 0xE0) {
    extra = 2;
    cp = c & 0x0F;
  } else if (c >= 0xC0) {
    extra = 1;
    cp = c & 0x1F;
  }
  if (extra == 0 || i + extra >= s.size()) {
    ++i;
    return c;
  }
  for (int k = 1; k <= extra; ++k) {
    auto cc = static_cast<unsigned char>(s[i + k]);
    if ((cc & 0xC0) != 0x80) {
      ++i;
      return c;
    }
    cp = (cp << 6) | (cc & 0x3F);
  }
  i += extra + 1;
  return cp;
}

LetterCase case_of(std::uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return LetterCase::Upper;
  if (cp >= 'a' && cp <= 'z') return LetterCase::Lower;
  // Latin-1 supplement letters, excluding the multiplication/division signs.
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return LetterCase::Upper;
  if (cp >= 0xDF && cp <= 0xFF && cp != 0xF7) return LetterCase::Lower;
  // Latin Extended-A alternates upper/lower in most of its range.
  if (cp >= 0x100 && cp <= 0x17F) {
    return (cp % 2 == 0) ? LetterCase::Upper : LetterCase::Lower;
  }
  return LetterCase::None;
}

}  // namespace

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  while (b < s.size() && is_space(static_cast<unsigned char>(s[b]))) ++b;
  std::size_t e = s.size();
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::size_t codepoint_count(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size();) {
    decode(s, i);
    ++n;
  }
  return n;
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t b = i;
    while (i < s.size() && !is_space(static_cast<unsigned char>(s[i]))) ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

LetterCase first_letter_case(std::string_view s) {
  for (std::size_t i = 0; i < s.size();) {
    LetterCase lc = case_of(decode(s, i));
    if (lc != LetterCase::None) return lc;
  }
  return LetterCase::None;
}

bool has_letter(std::string_view s) {
  return first_letter_case(s) != LetterCase::None;
}

}  // namespace reflines::text
