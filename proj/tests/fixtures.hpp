#pragma once

#include "gkd/diagram.hpp"

// Hand-built diagrams used across the test suites.
namespace fixtures {

using namespace gkd;

inline Diagram free_loop() { return build_diagram({}, {{0, {}, true}}); }

inline Diagram two_nested_loops() {
    // Second loop placed in the left face (head side) of the first,
    // coherently oriented with it.
    return build_diagram({}, {{0, {}, true}, {1, DartRef{0, 1, true}, false}});
}

// One positive kink on an unknot; the monogon pokes into the left face of
// the strand.  Slot layout: 0 = out to the long edge, 1 = out to the
// monogon edge, 2 = in from the monogon, 3 = in from the long edge.
inline Diagram kinked_unknot(SignedTag tag = {'r', true}) {
    CrossingRecord c{0, tag, {{{0, false}, {1, false}, {1, true}, {0, true}}}};
    return build_diagram({c}, {});
}

// Closure of sigma_1(t)^3 on two strands (trefoil pattern).  Crossing slot
// layout per braid letter: 0 = upper-out, 1 = upper-in, 2 = lower-in,
// 3 = lower-out.
inline Diagram trefoil(SignedTag tag = {'r', true}) {
    std::vector<CrossingRecord> cs;
    for (int j = 0; j < 3; ++j) {
        int up_out = 2 * j, lo_out = 2 * j + 1;
        int up_in = 2 * ((j + 2) % 3), lo_in = 2 * ((j + 2) % 3) + 1;
        cs.push_back({j, tag,
                      {{{up_out, false}, {up_in, true}, {lo_in, true}, {lo_out, false}}}});
    }
    return build_diagram(cs, {});
}

// The two-component worked example: outer cycle s1 bridged to inner cycles
// s2 and s4, middle inner cycle s3 bridged to s2 and s4.  Crossing slot
// layout: 0 = target-out, 1 = target-in, 2 = source-in, 3 = source-out,
// where the smoothing bridge runs from the source cycle (on its left) to
// the target cycle (on its right).
inline Diagram worked_example(SignedTag tag = {'r', true}) {
    // Crossings: 0 = s1->s2, 1 = s3->s2, 2 = s3->s4, 3 = s1->s4.
    // Edges: s1: e0 = 0.3->3.2, e1 = 3.3->0.2
    //        s2: e2 = 0.0->1.1, e3 = 1.0->0.1
    //        s3: e4 = 1.3->2.2, e5 = 2.3->1.2
    //        s4: e6 = 2.0->3.1, e7 = 3.0->2.1
    std::vector<CrossingRecord> cs = {
        {0, tag, {{{2, false}, {3, true}, {1, true}, {0, false}}}},
        {1, tag, {{{3, false}, {2, true}, {5, true}, {4, false}}}},
        {2, tag, {{{6, false}, {7, true}, {4, true}, {5, false}}}},
        {3, tag, {{{7, false}, {6, true}, {0, true}, {1, false}}}},
    };
    return build_diagram(cs, {});
}

// Closure of a braid word on n strands; letters are (generator index i,
// tag) with 1 <= i < n.  Every strand position must be used by some
// letter.  Crossing slot layout as in trefoil().
inline Diagram braid_closure(int n,
                             const std::vector<std::pair<int, SignedTag>>& word) {
    int next_edge = 0;
    std::vector<int> open(n + 1), initial(n + 1);
    for (int p = 1; p <= n; ++p) open[p] = initial[p] = next_edge++;
    std::vector<CrossingRecord> recs;
    int cid = 0;
    for (const auto& [i, t] : word) {
        int up = open[i + 1], lo = open[i];
        int a = next_edge++, b = next_edge++;
        recs.push_back({cid++, t, {{{a, false}, {up, true}, {lo, true}, {b, false}}}});
        open[i + 1] = a;
        open[i] = b;
    }
    // Close up: the dangling edge at each position is the one that started
    // there.
    std::map<int, int> rename;
    for (int p = 1; p <= n; ++p) {
        if (open[p] == initial[p])
            throw DiagramError("braid_closure: unused strand position");
        rename[initial[p]] = open[p];
    }
    for (auto& r : recs)
        for (auto& e : r.ends)
            if (auto it = rename.find(e.edge_id); it != rename.end())
                e.edge_id = it->second;
    return build_diagram(recs, {});
}

}  // namespace fixtures
