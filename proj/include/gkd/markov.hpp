#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gkd/moves.hpp"
#include "gkd/theory.hpp"

namespace gkd {

struct MarkovError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// h at every diagram of a replayed sequence, with derived features.
struct HProfile {
    std::vector<int> values;                  // length = moves + 1
    std::vector<int> peaks;                   // rise then fall
    std::vector<int> divots;                  // fall then rise
    std::vector<std::pair<int, int>> plateaus;  // maximal equal-h runs, len > 1
    std::vector<int> flagged;  // h-changing moves that are not V / non-Markov R1

    int max_h() const;
};

HProfile replay(const MoveSequence& seq, const Theory& t);

// Rebase a record list replayable from `from` onto `onto`, an isomorphic
// diagram with possibly different labels; nullopt when any step fails to
// transfer.
std::optional<std::vector<MoveRecord>> remap_tail(
    Diagram onto, Diagram from, const std::vector<MoveRecord>& tail,
    const Theory& t);

enum class RewriteStatus { cancelled, replaced, interchanged, unsupported };

std::string to_string(RewriteStatus s);

// A certified local rewrite: `replacement` applies from the diagram before
// the rewritten segment and ends isomorphic to the diagram after it.
struct RewriteOutcome {
    RewriteStatus status = RewriteStatus::unsupported;
    MoveSequence replacement;
    bool endpoints_match = false;
    int max_h = 0;      // max h over the replacement's diagrams
    std::string note;   // case label, or the reason it is unsupported
};

// Rewrite the peak at diagram index i (moves[i-1] raises, moves[i] lowers)
// into a segment whose h stays strictly below the summit.  Implemented
// cases: same-locus cancellation, disjoint-track interchange, V-move
// conjugation of an R1 raise, and a bounded certified search over V/R2
// moves for the three- and four-arc configurations.  Anything else is
// reported unsupported; a wrong rewrite is never returned.
RewriteOutcome peak_rewrite(const MoveSequence& seq, int i, const Theory& t);

// Rewrite moves[i] (raising) followed by moves[i+1] (h-neutral) so the
// raise happens last.  Implemented cases: disjoint interchange, V-move
// conjugation of an R1 raise, and the bounded certified search for the
// crossing-tracks R2' configuration.
RewriteOutcome transport_rewrite(const MoveSequence& seq, int i,
                                 const Theory& t);

struct NormalizeOutcome {
    bool braided = false;          // success: all intermediate h = 0
    MoveSequence sequence;         // flat result, or the partial reduction
    std::vector<std::string> log;  // one line per lemma application
    std::string failure;           // empty on success
};

// Flatten a sequence between braided endpoints: repeatedly pick the
// leftmost maximal plateau, transport its raising move right until a peak
// forms, and reduce the peak.  Unsupported configurations stop the loop
// with the partially reduced sequence.
NormalizeOutcome markov_normalize(const MoveSequence& seq, const Theory& t,
                                  int budget = 500);

}  // namespace gkd
