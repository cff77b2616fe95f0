#ifndef SDOH_UTF8_HPP
#define SDOH_UTF8_HPP

#include <cstddef>
#include <string>
#include <string_view>

namespace sdoh::utf8 {

// Decoding never throws: an invalid byte decodes as one U+FFFD so that any
// file can be inspected and offsets stay monotone.
std::u32string decode(std::string_view s);

std::string encode(std::u32string_view s);
std::string encode(char32_t c);

// Number of code points in s.
std::size_t length(std::string_view s);

// Byte offset of code point index cp (clamped to the end of s).
std::size_t byte_offset(std::string_view s, std::size_t cp);

// Substring [start, end) in code-point offsets, clamped.
std::string slice(std::string_view s, std::size_t start, std::size_t end);

}  // namespace sdoh::utf8

#endif
