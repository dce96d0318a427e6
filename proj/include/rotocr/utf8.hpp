#pragma once

#include <string>
#include <string_view>

namespace rotocr::utf8 {

/// Decodes UTF-8 into code points; malformed sequences become U+FFFD.
std::u32string decode(std::string_view text);
std::string encode(std::u32string_view text);

/// Number of code points.
std::size_t length(std::string_view text);

/// Simple lowercase mapping for ASCII, Latin-1, Latin Extended-A, Greek and
/// Cyrillic. Other code points pass through unchanged.
char32_t to_lower(char32_t c) noexcept;
std::string to_lower(std::string_view text);

/// Removes leading and trailing ASCII/Unicode whitespace.
std::string trim(std::string_view text);

}  // namespace rotocr::utf8
