#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "gkd/tag.hpp"

namespace gkd {

// A dart (half-edge) sits in one slot of a crossing, or at one end of a
// free loop's closed edge.  Crossing slots 0..3 run counterclockwise; the
// strand pairing joins slot i to slot i+2 (mod 4).  Loop slot 0 is the
// tail end, slot 1 the head end of the loop's self-edge.
struct DartRef {
    int owner = -1;
    int slot = 0;
    bool loop = false;

    bool valid() const { return owner >= 0; }
    friend auto operator<=>(const DartRef&, const DartRef&) = default;
};

std::string to_string(DartRef d);
DartRef parse_dart(const std::string& s);

struct Crossing {
    int id = -1;
    SignedTag tag;
};

struct FreeLoop {
    int id = -1;
};

// Oriented edge: tail dart is outgoing from its owner, head dart incoming.
struct Edge {
    int id = -1;
    DartRef tail, head;
};

// Places a connected component inside a face of another component: the
// local face holding `own` is identified with the local face holding
// `container`.  The component without a placement is the root (sphere).
struct Placement {
    DartRef own;
    DartRef container;
};

struct DiagramError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Diagram {
  public:
    std::map<int, Crossing> crossings;
    std::map<int, FreeLoop> loops;
    std::map<int, Edge> edges;
    std::vector<Placement> placements;

    bool empty() const { return crossings.empty() && loops.empty(); }

    int add_crossing(SignedTag tag);
    int add_loop();
    int add_edge(DartRef tail, DartRef head);
    void remove_crossing(int id);
    void remove_loop(int id);
    void remove_edge(int id);

    // Derived-index queries; reindex() is called lazily.
    int edge_of(DartRef d) const;
    const Edge& edge(int id) const;
    DartRef alpha(DartRef d) const;                // partner dart across the edge
    DartRef sigma(DartRef d) const;                // next dart counterclockwise
    bool is_out(DartRef d) const;                  // dart is an edge tail
    DartRef phi(DartRef d) const { return sigma(alpha(d)); }  // face permutation

    std::vector<DartRef> all_darts() const;
    bool has_dart(DartRef d) const;

    // Strand navigation: incoming dart -> outgoing dart of the same strand.
    DartRef through(DartRef in) const;
    // Seifert smoothing: incoming dart -> the adjacent outgoing dart.
    DartRef smooth_through(DartRef in) const;

    // Component key of a dart's owner: crossing components keyed by their
    // minimal crossing id, loops by ~loop_id (loops are always their own
    // component).
    int component_of(DartRef d) const;
    std::vector<int> component_keys() const;

    void validate() const;  // throws DiagramError; also refreshes the index

    // call after direct field mutation
    void touch() {
        dirty_ = true;
        cached_height = -1;
    }

    // Lazily filled by height(); -1 when stale.
    mutable int cached_height = -1;

  private:
    void reindex() const;
    struct DartInfo;
    const DartInfo& dart_info(DartRef d) const;

    // Packed dart key -> its edge and the cross-edge partner.
    struct DartInfo {
        int edge = -1;
        DartRef partner;
        bool out = false;
    };
    static long long dart_key(DartRef d) {
        return (static_cast<long long>(d.owner) << 3) | (d.slot << 1) |
               (d.loop ? 1 : 0);
    }

    mutable bool dirty_ = true;
    mutable std::unordered_map<long long, DartInfo> dart_edge_;
    mutable std::map<int, int> comp_of_crossing_;  // crossing id -> component key
};

// Face structure.  Local walks are phi-orbits; the global faces merge local
// walks across placements.  The orbit of a tail dart is the face on the
// right of the edge's direction, the orbit of a head dart the face on its
// left.
struct FaceSet {
    std::vector<std::vector<DartRef>> walks;   // phi-orbits, each a cyclic walk
    std::map<DartRef, int> walk_of;
    std::vector<int> face_of_walk;             // walk index -> face id
    int face_count = 0;                        // global faces (>= 1)

    int face_of(DartRef d) const { return face_of_walk[walk_of.at(d)]; }
    std::vector<std::vector<int>> faces() const;  // face id -> walk indices
};

FaceSet trace_faces(const Diagram& d);

inline int left_face(const Diagram& d, const FaceSet& f, int edge_id) {
    return f.face_of(d.edge(edge_id).head);
}
inline int right_face(const Diagram& d, const FaceSet& f, int edge_id) {
    return f.face_of(d.edge(edge_id).tail);
}

// Input records for build_diagram: one crossing with tag and the four
// edge-end labels (edge id + direction) in counterclockwise slot order.
struct CrossingRecord {
    int id;
    SignedTag tag;
    struct End {
        int edge_id;
        bool incoming;
    };
    std::array<End, 4> ends;
};

struct LoopRecord {
    int id;
    // Placement: container dart (invalid => sphere), own-side flag.
    DartRef container;
    bool own_head_side = true;
};

struct PlacementRecord {
    DartRef own;
    DartRef container;
};

Diagram build_diagram(const std::vector<CrossingRecord>& crossings,
                      const std::vector<LoopRecord>& loops,
                      const std::vector<PlacementRecord>& placements = {});

}  // namespace gkd
