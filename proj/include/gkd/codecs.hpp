#pragma once

#include <stdexcept>
#include <string>

#include "gkd/braiding.hpp"
#include "gkd/diagram.hpp"
#include "gkd/moves.hpp"
#include "gkd/theory.hpp"

namespace gkd {

struct CodecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Diagram files.  Line-oriented UTF-8, '#' comments:
//   gkd 1
//   theory <name>            (or a full inline theory block)
//   X <id> <tag> <e><i|o> <e><i|o> <e><i|o> <e><i|o>   slots counterclockwise
//   O <id> <container-dart|sphere> [-]   '-' hangs the loop by its tail side
//   P <own-dart> <container-dart>        crossing-component placement
struct GkdDocument {
    int version = 1;
    Theory theory;
    Diagram diagram;
};

GkdDocument parse_gkd(const std::string& text);

// Canonical emission: ids renumbered in canonical_code order, so equal
// canonical forms emit identical bytes.  parse(emit(d)) is isomorphic to d.
std::string emit_gkd(const Diagram& d, const Theory& t);

// Braid words:  braid n=<k>: s<i>(<tag>) s<j>(~<tag>) ...
BraidWord parse_braid(const std::string& text);
std::string emit_braid(const BraidWord& w);

// Move sequences: a gkd body (header swapped for `moveseq 1`) followed by
//   move <kind> <sign> [t:<tag>]* [d:<dart>]* [e:<edge>]* h:<dh>
// Parsing replays the moves, so the sequence is validated end to end.
struct MoveSeqDocument {
    Theory theory;
    MoveSequence sequence;
};

MoveSeqDocument parse_moveseq(const std::string& text);

// One move line, with or without the leading `move` keyword.
MoveRecord parse_move(const std::string& text);

// Canonical emission: the initial diagram is relabeled canonically and the
// move records are rebased onto the relabeling.
std::string emit_moveseq(const MoveSequence& seq, const Theory& t);

}  // namespace gkd
