#include "dataprog/text.hpp"

#include <cstdint>

namespace dataprog::text {

namespace {

char32_t fold_code_point(char32_t c) {
  if (c < 0x80) return (c >= 'A' && c <= 'Z') ? c + 0x20 : c;
  if (c == 0x00B5) return 0x03BC;                                   // micro sign
  if (c >= 0x00C0 && c <= 0x00DE && c != 0x00D7) return c + 0x20;   // Latin-1
  if (c >= 0x0100 && c <= 0x012F) return c | 1;                     // Latin Ext-A pairs
  if (c == 0x0130) return c;                                        // dotted I has no simple fold
  if (c >= 0x0132 && c <= 0x0137) return c | 1;
  if (c >= 0x0139 && c <= 0x0148) return (c & 1) ? c + 1 : c;
  if (c >= 0x014A && c <= 0x0177) return c | 1;
  if (c == 0x0178) return 0x00FF;
  if (c >= 0x0179 && c <= 0x017E) return (c & 1) ? c + 1 : c;
  if (c == 0x017F) return 's';
  if (c >= 0x0391 && c <= 0x03AB && c != 0x03A2) return c + 0x20;   // Greek
  if (c == 0x03C2) return 0x03C3;                                   // final sigma
  if (c >= 0x0400 && c <= 0x040F) return c + 0x50;                  // Cyrillic
  if (c >= 0x0410 && c <= 0x042F) return c + 0x20;
  if (c >= 0x1E00 && c <= 0x1E95) return c | 1;                     // Latin Ext Additional
  if (c == 0x1E9E) return 0x00DF;
  if (c >= 0x1EA0 && c <= 0x1EFF) return c | 1;
  return c;
}

// Decodes one code point at s[i]; returns byte length, 0 on invalid input.
std::size_t decode(std::string_view s, std::size_t i, char32_t& out) {
  auto b = [&](std::size_t k) { return static_cast<unsigned char>(s[i + k]); };
  unsigned char c0 = b(0);
  std::size_t len = c0 < 0x80 ? 1 : (c0 >> 5) == 0x6 ? 2 : (c0 >> 4) == 0xE ? 3 : (c0 >> 3) == 0x1E ? 4 : 0;
  if (len == 0 || i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    if ((b(k) & 0xC0) != 0x80) return 0;
  }
  switch (len) {
    case 1: out = c0; break;
    case 2: out = (char32_t(c0 & 0x1F) << 6) | (b(1) & 0x3F); break;
    case 3: out = (char32_t(c0 & 0x0F) << 12) | (char32_t(b(1) & 0x3F) << 6) | (b(2) & 0x3F); break;
    default:
      out = (char32_t(c0 & 0x07) << 18) | (char32_t(b(1) & 0x3F) << 12) |
            (char32_t(b(2) & 0x3F) << 6) | (b(3) & 0x3F);
  }
  return len;
}

void encode(char32_t c, std::string& out) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

std::string fold_case(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  std::size_t i = 0;
  while (i < utf8.size()) {
    unsigned char c = static_cast<unsigned char>(utf8[i]);
    if (c < 0x80) {
      out.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c + 0x20) : static_cast<char>(c));
      ++i;
      continue;
    }
    char32_t cp = 0;
    std::size_t len = decode(utf8, i, cp);
    if (len == 0) {
      out.push_back(utf8[i]);
      ++i;
      continue;
    }
    encode(fold_code_point(cp), out);
    i += len;
  }
  return out;
}

bool contains(std::string_view haystack, std::string_view needle) {
  return haystack.find(needle) != std::string_view::npos;
}

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return 0;
  std::size_t count = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

std::string_view first_token(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && is_space(s[i])) ++i;
  std::size_t start = i;
  while (i < s.size() && !is_space(s[i])) ++i;
  return s.substr(start, i - start);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace dataprog::text
