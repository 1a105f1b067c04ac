#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gkd/diagram.hpp"
#include "gkd/theory.hpp"

namespace gkd {

enum class MoveKind { R1, R2p, R2pp, V, R3p, R3pp, R4, MarkovR1 };

std::string to_string(MoveKind k);
MoveKind parse_move_kind(const std::string& s);

// A located move.  Locus conventions, per kind:
//   R1/MarkovR1 +  : edges = {e}; darts = {e.head} for a monogon on the left
//                    of e, {e.tail} for the right; tags = {crossing tag}.
//   R1/MarkovR1 -  : darts = {the monogon's interior dart}; tags optional
//                    (validated when present).
//   R2p/R2pp/V +   : darts = {d1, d2}, two darts of one face orbit on the
//                    two target edges; same in/out type means R2'' (V when
//                    the edges lie on distinct cycles).  tags = {a}: the
//                    crossing entered first along d1's strand gets a, the
//                    other gets ~a.
//   R2p/R2pp/V -   : darts = {either dart of the bigon face}.
//   R3p/R3pp       : darts = {a dart of the trigon face}.
//   R4             : darts = {a dart of the bigon face}; the two crossing
//                    tags are swapped verbatim.
// sign: +1 creating, -1 deleting, 0 neutral.
struct MoveRecord {
    MoveKind kind = MoveKind::R1;
    int sign = 0;
    std::vector<SignedTag> tags;
    std::vector<DartRef> darts;
    std::vector<int> edges;
    int h_delta = 0;  // recorded; recertified on application
};

struct MoveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ApplyResult {
    Diagram diagram;
    MoveRecord applied;  // input record with h_delta filled in
    MoveRecord inverse;  // undoes the move on `diagram`
};

ApplyResult apply_move(const Diagram& d, const MoveRecord& m, const Theory& t);

struct MoveBudget {
    bool creating = true;
    int max_creating = 200;       // cap on enumerated creating records
    bool r2_same_cycle = true;    // include non-V R2+ loci
};

std::vector<MoveRecord> applicable_moves(const Diagram& d, const Theory& t,
                                         const MoveBudget& budget = {});

struct MoveSequence {
    Diagram initial;
    std::vector<MoveRecord> moves;
};

// Replays and returns every intermediate diagram (size = moves + 1).
std::vector<Diagram> replay_diagrams(const MoveSequence& seq, const Theory& t);

// Finger and detour moves, and the generator decompositions.
enum class FingerKind { A, B };

// Pushes a finger from edge `from` across the parallel arcs listed in
// `across` (all bordering successive faces of the track).  Returns the
// constituent R2/R3 records already applied.
struct FingerResult {
    Diagram diagram;
    std::vector<MoveRecord> records;
    std::vector<MoveRecord> retraction;  // inverse records, innermost first
};

FingerResult finger_move(const Diagram& d, DartRef from,
                         const std::vector<DartRef>& across, FingerKind kind,
                         const Theory& t, std::optional<SignedTag> tag = {});

// Detour: replace the strand subpath consisting of the edges `p` (whose
// crossings must all show the dominant tag in the x-above configuration,
// i.e. the subpath's crossings carry x or ~x and the subpath passes as the
// slot-0/2 strand) by a path through the faces of `p_new_track` (darts
// identifying successive faces from the same endpoints).  Built from
// A/B finger moves and R2 cancellations; loci outside the supported shape
// raise MoveError.
MoveSequence detour(const Diagram& d, const std::vector<int>& p,
                    const std::vector<DartRef>& p_new_track, const Theory& t);

// Rewrites one decomposable move (positive non-V R2'' or positive
// non-Markov R1 at h = 0) into a sequence whose only h-changing moves are
// V moves and Markov R1 moves.  The sequence starts at d.
MoveSequence decompose(const Diagram& d, const MoveRecord& m, const Theory& t);

}  // namespace gkd
