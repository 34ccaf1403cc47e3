#pragma once

#include <string>
#include <string_view>

namespace farsivec::utf8 {

inline constexpr char32_t kZwnj = U'\u200C';
inline constexpr std::string_view kZwnjUtf8 = "\xE2\x80\x8C";

bool is_valid(std::string_view bytes);

/// Throws EncodingError on malformed input.
std::u32string decode(std::string_view bytes);
std::string encode(std::u32string_view text);
std::string encode(char32_t cp);

/// Arabic-script letters (including the Persian additions) and ASCII letters.
bool is_letter(char32_t cp);
bool is_persian_letter(char32_t cp);

/// ASCII whitespace. ZWNJ is not whitespace.
inline bool is_space(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\v' || cp == U'\f';
}

}  // namespace farsivec::utf8
