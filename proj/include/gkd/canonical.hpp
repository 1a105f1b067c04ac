#pragma once

#include <map>
#include <string>
#include <vector>

#include "gkd/diagram.hpp"

namespace gkd {

// Canonical relabeling data: enough to emit byte-identical text for
// isomorphic diagrams.
struct CanonicalLayout {
    std::string code;

    // Renumbering chosen by the canonical traversal.
    std::vector<int> crossing_order;           // old crossing ids, new order
    std::vector<int> loop_order;               // old loop ids, new order
    std::map<int, int> slot_shift;             // crossing id -> entry slot
    std::vector<Placement> placements;         // re-rooted, canonical reps
};

// Equal codes iff the diagrams are isomorphic by an orientation- and
// tag-preserving homeomorphism of the sphere.
std::string canonical_code(const Diagram& d);

CanonicalLayout canonical_layout(const Diagram& d);

bool is_isomorphic(const Diagram& a, const Diagram& b);

}  // namespace gkd
