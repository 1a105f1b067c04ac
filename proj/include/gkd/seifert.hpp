#pragma once

#include <optional>
#include <set>
#include <vector>

#include "gkd/diagram.hpp"

namespace gkd {

// One smoothed cycle: the diagram edges it passes, in order.
struct SeifertCycle {
    int id = -1;
    std::vector<int> edges;
    bool is_loop = false;  // a free loop, no crossings
};

// A smoothed crossing.  The two incoming darts sit at slots in_slot and
// in_slot+1; strand A runs in@in_slot -> out@in_slot+3 and strand B runs
// in@in_slot+1 -> out@in_slot+2.  The bridge attaches on A's right and B's
// left, so it is oriented from B's cycle to A's cycle.
struct SeifertBridge {
    int crossing = -1;
    SignedTag tag;
    int in_slot = 0;
    int cycle_from = -1, cycle_to = -1;  // B's cycle -> A's cycle
    int arc_from = -1, arc_to = -1;      // in-edge at each attachment
    int corner_from = -1, corner_to = -1;  // regions the bridge separates
};

struct SeifertStructure {
    Diagram diagram;                      // the smoothed source
    FaceSet regions;                      // faces of the source = regions
    std::vector<SeifertCycle> cycles;
    std::map<int, int> cycle_of_edge;
    std::vector<SeifertBridge> bridges;

    // Zones: regions with the bridges deleted.
    std::vector<int> zone_of_face;        // region id -> zone id
    int zone_count = 0;

    std::vector<std::set<int>> region_cycles;  // region -> cycles on boundary
    std::vector<bool> region_has_bridge;
    std::vector<int> polar_regions;       // regions bounded by a single cycle
    std::set<int> polar_cycles;

    int left_zone(int cycle) const;
    int right_zone(int cycle) const;
};

SeifertStructure smooth(const Diagram& d);

// Tree on zones; one edge per cycle, oriented left zone -> right zone.
struct CycleTree {
    int zone_count = 0;
    std::vector<std::pair<int, int>> edges;  // cycle id -> (left, right)

    // Chain-orientation coherence: the two cycle edges point the same way
    // along the unique path joining them.
    bool coherent_chain(int c1, int c2) const;
};

CycleTree cycle_tree(const SeifertStructure& s);

struct CoherenceData {
    std::vector<std::vector<bool>> coherent;  // symmetric, diagonal unused
    std::vector<int> per_cycle;               // h(s) = # incoherent partners
    int h = 0;                                // # incoherent unordered pairs
};

CoherenceData coherence(const SeifertStructure& s);

int height(const Diagram& d);  // h of the smoothed diagram

struct VogelSite {
    int cycle_a = -1, cycle_b = -1;  // adjacent incoherent pair, a < b
    int region = -1;                 // shared region
    int arc_a = -1, arc_b = -1;      // an edge of each cycle on the region
};

// Smallest site by (cycle pair, region, arcs); empty iff h = 0.
std::optional<VogelSite> find_vogel_site(const SeifertStructure& s);

}  // namespace gkd
