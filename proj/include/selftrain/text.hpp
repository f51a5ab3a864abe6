#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace selftrain {

// ASCII whitespace; multi-byte unicode spaces are deliberately not token
// separators so that byte-level scans stay well-defined on any input.
constexpr bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

constexpr bool is_word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

// Number of unicode scalar values in a UTF-8 string (continuation bytes
// 0b10xxxxxx are not counted). Invalid UTF-8 degrades gracefully: every
// non-continuation byte counts as one scalar.
constexpr std::size_t scalar_count(std::string_view text) {
    std::size_t n = 0;
    for (unsigned char c : text) {
        if ((c & 0xC0) != 0x80) ++n;
    }
    return n;
}

// Byte offset of each scalar start, with text.size() appended as a
// sentinel, so scalar i spans [offsets[i], offsets[i+1]).
inline std::vector<std::size_t> scalar_offsets(std::string_view text) {
    std::vector<std::size_t> offsets;
    offsets.reserve(text.size() + 1);
    for (std::size_t i = 0; i < text.size(); ++i) {
        if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) offsets.push_back(i);
    }
    offsets.push_back(text.size());
    return offsets;
}

// Whitespace-delimited tokens as views into the input.
inline std::vector<std::string_view> split_tokens(std::string_view text) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        if (i > start) tokens.push_back(text.substr(start, i - start));
    }
    return tokens;
}

} // namespace selftrain
