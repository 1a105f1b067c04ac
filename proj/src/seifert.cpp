#include "gkd/seifert.hpp"

#include <algorithm>
#include <functional>

namespace gkd {

int SeifertStructure::left_zone(int cycle) const {
    const Edge& e = diagram.edge(cycles.at(cycle).edges.front());
    return zone_of_face[regions.face_of(e.head)];
}

int SeifertStructure::right_zone(int cycle) const {
    const Edge& e = diagram.edge(cycles.at(cycle).edges.front());
    return zone_of_face[regions.face_of(e.tail)];
}

SeifertStructure smooth(const Diagram& d) {
    d.validate();
    SeifertStructure s;
    s.diagram = d;
    s.regions = trace_faces(d);

    // Cycles: orbits of edge -> edge_of(smooth_through(head)).
    for (auto& [eid, e] : d.edges) {
        if (s.cycle_of_edge.count(eid)) continue;
        SeifertCycle cyc;
        cyc.id = (int)s.cycles.size();
        int cur = eid;
        do {
            cyc.edges.push_back(cur);
            s.cycle_of_edge[cur] = cyc.id;
            cur = d.edge_of(d.smooth_through(d.edge(cur).head));
        } while (cur != eid);
        cyc.is_loop = d.edge(eid).tail.loop;
        s.cycles.push_back(std::move(cyc));
    }

    // Bridges, one per crossing.
    for (auto& [cid, c] : d.crossings) {
        SeifertBridge b;
        b.crossing = cid;
        b.tag = c.tag;
        for (int slot = 0; slot < 4; ++slot) {
            DartRef x{cid, slot}, y{cid, (slot + 1) % 4};
            if (!d.is_out(x) && !d.is_out(y)) b.in_slot = slot;
        }
        DartRef in_a{cid, b.in_slot}, in_b{cid, (b.in_slot + 1) % 4};
        b.arc_to = d.edge_of(in_a);
        b.arc_from = d.edge_of(in_b);
        b.cycle_to = s.cycle_of_edge.at(b.arc_to);
        b.cycle_from = s.cycle_of_edge.at(b.arc_from);
        b.corner_from = s.regions.face_of(in_b);                        // (i, i+1)
        b.corner_to = s.regions.face_of({cid, (b.in_slot + 3) % 4});    // (i+2, i+3)
        s.bridges.push_back(b);
    }

    // Zones: union-find regions across deleted bridges.
    std::vector<int> parent(s.regions.face_count);
    for (size_t i = 0; i < parent.size(); ++i) parent[i] = (int)i;
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto& b : s.bridges) {
        int a = find(b.corner_from), c = find(b.corner_to);
        if (a != c) parent[std::max(a, c)] = std::min(a, c);
    }
    s.zone_of_face.assign(s.regions.face_count, -1);
    std::map<int, int> rename;
    for (int f = 0; f < s.regions.face_count; ++f) {
        auto [it, fresh] = rename.emplace(find(f), (int)rename.size());
        s.zone_of_face[f] = it->second;
    }
    s.zone_count = (int)rename.size();

    // Region annotations.
    s.region_cycles.assign(s.regions.face_count, {});
    s.region_has_bridge.assign(s.regions.face_count, false);
    for (auto& walk : s.regions.walks) {
        int f = s.regions.face_of(walk.front());
        for (auto dart : walk)
            s.region_cycles[f].insert(s.cycle_of_edge.at(d.edge_of(dart)));
    }
    for (auto& b : s.bridges) {
        s.region_has_bridge[b.corner_from] = true;
        s.region_has_bridge[b.corner_to] = true;
    }
    for (int f = 0; f < s.regions.face_count; ++f)
        if (!s.region_has_bridge[f] && s.region_cycles[f].size() == 1) {
            s.polar_regions.push_back(f);
            s.polar_cycles.insert(*s.region_cycles[f].begin());
        }
    return s;
}

CycleTree cycle_tree(const SeifertStructure& s) {
    CycleTree t;
    t.zone_count = s.zone_count;
    for (auto& c : s.cycles)
        t.edges.push_back({s.left_zone(c.id), s.right_zone(c.id)});
    return t;
}

namespace {

// Distances from zone `from` in the tree, skipping the edge `skip`.
std::vector<int> tree_dist(const CycleTree& t, int from, int skip = -1) {
    std::vector<std::vector<std::pair<int, int>>> adj(t.zone_count);
    for (size_t e = 0; e < t.edges.size(); ++e) {
        if ((int)e == skip) continue;
        adj[t.edges[e].first].push_back({t.edges[e].second, (int)e});
        adj[t.edges[e].second].push_back({t.edges[e].first, (int)e});
    }
    std::vector<int> dist(t.zone_count, -1);
    std::vector<int> queue{from};
    dist[from] = 0;
    for (size_t i = 0; i < queue.size(); ++i)
        for (auto [nxt, e] : adj[queue[i]])
            if (dist[nxt] < 0) {
                dist[nxt] = dist[queue[i]] + 1;
                queue.push_back(nxt);
            }
    return dist;
}

// Does cycle b lie in the right disk of cycle a?
bool in_right_disk(const CycleTree& t, int b, int a) {
    auto dist = tree_dist(t, t.edges[a].second, a);
    return dist[t.edges[b].first] >= 0;
}

}  // namespace

bool CycleTree::coherent_chain(int c1, int c2) const {
    if (c1 == c2) return true;
    auto [l1, r1] = edges[c1];
    auto [l2, r2] = edges[c2];
    constexpr int INF = 1 << 29;
    // Distance from zone z to the other edge, without traversing `skip`.
    auto dist_to = [&](int z, int skip, int la, int ra) {
        auto d = tree_dist(*this, z, skip);
        int a = d[la] < 0 ? INF : d[la];
        int b = d[ra] < 0 ? INF : d[ra];
        return std::min(a, b);
    };
    bool c1_toward = dist_to(r1, c1, l2, r2) < dist_to(l1, c1, l2, r2);
    bool c2_away = dist_to(l2, c2, l1, r1) < dist_to(r2, c2, l1, r1);
    return c1_toward == c2_away;
}

CoherenceData coherence(const SeifertStructure& s) {
    CycleTree t = cycle_tree(s);
    int n = (int)s.cycles.size();
    CoherenceData c;
    c.coherent.assign(n, std::vector<bool>(n, true));
    c.per_cycle.assign(n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            bool ij = in_right_disk(t, j, i), ji = in_right_disk(t, i, j);
            bool coh = ij != ji;
            c.coherent[i][j] = c.coherent[j][i] = coh;
            if (!coh) {
                c.per_cycle[i]++;
                c.per_cycle[j]++;
                c.h++;
            }
        }
    return c;
}

int height(const Diagram& d) {
    if (d.cached_height < 0) d.cached_height = coherence(smooth(d)).h;
    return d.cached_height;
}

std::optional<VogelSite> find_vogel_site(const SeifertStructure& s) {
    auto coh = coherence(s);
    if (coh.h == 0) return std::nullopt;
    std::optional<VogelSite> best;
    for (int a = 0; a < (int)s.cycles.size() && !best; ++a)
        for (int b = a + 1; b < (int)s.cycles.size() && !best; ++b) {
            if (coh.coherent[a][b]) continue;
            for (int f = 0; f < s.regions.face_count; ++f) {
                if (!s.region_cycles[f].count(a) || !s.region_cycles[f].count(b))
                    continue;
                VogelSite site;
                site.cycle_a = a;
                site.cycle_b = b;
                site.region = f;
                auto smallest_arc = [&](int cyc) {
                    int arc = -1;
                    for (auto& walk : s.regions.walks) {
                        if (s.regions.face_of(walk.front()) != f) continue;
                        for (auto dart : walk) {
                            int e = s.diagram.edge_of(dart);
                            if (s.cycle_of_edge.at(e) == cyc && (arc < 0 || e < arc))
                                arc = e;
                        }
                    }
                    return arc;
                };
                site.arc_a = smallest_arc(a);
                site.arc_b = smallest_arc(b);
                best = site;
                break;
            }
        }
    if (!best)
        throw DiagramError(
            "height is positive but no adjacent incoherent cycle pair exists "
            "(disconnected diagram not covered by the adjacency lemma)");
    return best;
}

}  // namespace gkd
