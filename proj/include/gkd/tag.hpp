#pragma once

#include <compare>
#include <stdexcept>
#include <string>

namespace gkd {

// A crossing tag: a letter from a theory's alphabet together with a sign.
// The negative version of `a` is written `~a` in text formats and rendered
// as a-bar in the literature.
struct SignedTag {
    char letter = 'r';
    bool positive = true;

    friend auto operator<=>(const SignedTag&, const SignedTag&) = default;
};

inline SignedTag bar(SignedTag t) { return {t.letter, !t.positive}; }

inline std::string to_string(SignedTag t) {
    std::string s;
    if (!t.positive) s += '~';
    s += t.letter;
    return s;
}

inline SignedTag parse_signed_tag(const std::string& s) {
    if (s.size() == 1) return {s[0], true};
    if (s.size() == 2 && s[0] == '~') return {s[1], false};
    throw std::runtime_error("bad signed tag: '" + s + "'");
}

}  // namespace gkd
