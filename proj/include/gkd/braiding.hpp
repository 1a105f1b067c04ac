#pragma once

#include <utility>
#include <vector>

#include "gkd/moves.hpp"
#include "gkd/theory.hpp"

namespace gkd {

struct BraidError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Word in the generators sigma_i(t), 1 <= i < strands.
struct BraidWord {
    int strands = 1;
    std::vector<std::pair<int, SignedTag>> letters;

    bool operator==(const BraidWord&) const = default;
};

// True iff h(d) = 0.
bool is_braided(const Diagram& d);

struct BraidResult {
    MoveSequence sequence;  // exactly h(d) V+ moves
    Diagram diagram;        // braided endpoint
};

// Vogel braiding process: repeatedly push one arc of the smallest
// incoherent adjacent cycle pair across the other, tagged with the
// theory's braiding tag.  Requires a regular theory.
BraidResult braid(const Diagram& d, const Theory& t);

// Closed diagram of a braid word: nested coherent latitude circles with
// one crossing per letter.  Unused strand positions become free loops.
Diagram closure(const BraidWord& w, const Theory& t);

// Read a braid word back off a braided diagram; strand i is the i-th
// cycle in right-disk inclusion order, and the letter order follows a
// deterministic cut from pole to pole.  closure(extract_word(d)) is
// isomorphic to d.
BraidWord extract_word(const Diagram& d);

}  // namespace gkd
