#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "gkd/tag.hpp"

namespace gkd {

// A knot theory: a tag alphabet plus allowability tables for the four R
// moves.  Theories are immutable once built; all queries are lookups.
struct Theory {
    std::string name;
    std::set<char> tags;
    std::set<char> involutive;                      // tags with a == ~a
    std::set<SignedTag> r1;                         // per signed tag
    std::set<char> r2;                              // per letter: (a, ~a) bigons
    std::set<std::array<SignedTag, 3>> r3;          // ordered R3' triples
    bool r3_double_from_single = true;              // R3'' allowed when R3' is
    std::set<std::pair<SignedTag, SignedTag>> r4;   // unordered, stored sorted
    char braiding_tag = 'r';                        // tag used by V moves

    bool has_tag(char c) const { return tags.count(c) != 0; }

    // Normalizes the sign of involutive letters to positive.
    SignedTag canon(SignedTag t) const {
        if (involutive.count(t.letter)) return {t.letter, true};
        return t;
    }

    bool r1_allowed(SignedTag t) const { return r1.count(canon(t)) != 0; }
    bool r2_allowed(char letter) const { return r2.count(letter) != 0; }
    bool r3_allowed(SignedTag a, SignedTag b, SignedTag c) const {
        return r3.count({canon(a), canon(b), canon(c)}) != 0;
    }
    bool r4_allowed(SignedTag a, SignedTag b) const;

    void add_r3(SignedTag a, SignedTag b, SignedTag c) {
        r3.insert({canon(a), canon(b), canon(c)});
    }
    void add_r4(SignedTag a, SignedTag b);

    // All signed tags of the alphabet, involutive letters listed once.
    std::vector<SignedTag> signed_tags() const;

    void validate() const;  // throws on inconsistent tables
};

struct TheoryClassification {
    bool regular = false;
    bool normal = false;
    std::set<SignedTag> dominant;
};

// Built-in presets: classical, virtual, welded, doodle, virtual_doodle,
// free, singular.
Theory preset(const std::string& name);

TheoryClassification classify(const Theory& t);

// x dominates a: R3'(x, ~x, a) and R3'(~x, x, a) both allowed.
bool dominates(const Theory& t, SignedTag x, SignedTag a);

// Parses the declarative theory file format:
//   theory <name>
//   tag <letter> [involutive]
//   r1 <signed-tag>
//   r2 <letter>
//   r3 <t1> <t2> <t3>
//   r4 <t1> <t2>
//   braiding <letter>
Theory parse_theory(const std::string& text);
std::string emit_theory(const Theory& t);

}  // namespace gkd
