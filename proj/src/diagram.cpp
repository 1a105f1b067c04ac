#include "gkd/diagram.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <unordered_set>

namespace gkd {

std::string to_string(DartRef d) {
    std::ostringstream s;
    if (!d.valid()) return "-";
    if (d.loop)
        s << 'o' << d.owner << '.' << (d.slot == 0 ? 't' : 'h');
    else
        s << 'c' << d.owner << '.' << d.slot;
    return s.str();
}

DartRef parse_dart(const std::string& s) {
    auto fail = [&] { throw DiagramError("bad dart reference: '" + s + "'"); };
    if (s.size() < 3) fail();
    auto dot = s.find('.');
    if (dot == std::string::npos || dot == 1) fail();
    int owner = 0;
    try {
        owner = std::stoi(s.substr(1, dot - 1));
    } catch (...) {
        fail();
    }
    std::string tail = s.substr(dot + 1);
    if (s[0] == 'c') {
        if (tail.size() != 1 || tail[0] < '0' || tail[0] > '3') fail();
        return {owner, tail[0] - '0', false};
    }
    if (s[0] == 'o') {
        if (tail == "t") return {owner, 0, true};
        if (tail == "h") return {owner, 1, true};
        fail();
    }
    fail();
    return {};
}

template <class M>
static int next_id(const M& m) {
    return m.empty() ? 0 : m.rbegin()->first + 1;
}

int Diagram::add_crossing(SignedTag tag) {
    int id = next_id(crossings);
    crossings[id] = {id, tag};
    touch();
    return id;
}

int Diagram::add_loop() {
    int id = next_id(loops);
    loops[id] = {id};
    touch();
    return id;
}

int Diagram::add_edge(DartRef tail, DartRef head) {
    int id = next_id(edges);
    edges[id] = {id, tail, head};
    touch();
    return id;
}

void Diagram::remove_crossing(int id) {
    crossings.erase(id);
    touch();
}

void Diagram::remove_loop(int id) {
    loops.erase(id);
    touch();
}

void Diagram::remove_edge(int id) {
    edges.erase(id);
    touch();
}

void Diagram::reindex() const {
    if (!dirty_) return;
    dart_edge_.clear();
    dart_edge_.reserve(2 * edges.size());
    for (auto& [id, e] : edges) {
        if (dart_edge_.count(dart_key(e.tail)) ||
            dart_edge_.count(dart_key(e.head)))
            throw DiagramError("dart used by more than one edge");
        dart_edge_[dart_key(e.tail)] = {id, e.head, true};
        dart_edge_[dart_key(e.head)] = {id, e.tail, false};
    }
    // Connected components of crossings, joined by edges.
    std::map<int, int> parent;
    for (auto& [id, c] : crossings) parent[id] = id;
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto& [id, e] : edges)
        if (!e.tail.loop && !e.head.loop) {
            int a = find(e.tail.owner), b = find(e.head.owner);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    comp_of_crossing_.clear();
    for (auto& [id, c] : crossings) comp_of_crossing_[id] = find(id);
    dirty_ = false;
}

const Diagram::DartInfo& Diagram::dart_info(DartRef d) const {
    reindex();
    auto it = dart_edge_.find(dart_key(d));
    if (it == dart_edge_.end())
        throw DiagramError("dart " + to_string(d) + " belongs to no edge");
    return it->second;
}

int Diagram::edge_of(DartRef d) const { return dart_info(d).edge; }

const Edge& Diagram::edge(int id) const {
    auto it = edges.find(id);
    if (it == edges.end())
        throw DiagramError("no such edge: " + std::to_string(id));
    return it->second;
}

DartRef Diagram::alpha(DartRef d) const { return dart_info(d).partner; }

DartRef Diagram::sigma(DartRef d) const {
    if (d.loop) return {d.owner, 1 - d.slot, true};
    return {d.owner, (d.slot + 1) % 4, false};
}

bool Diagram::is_out(DartRef d) const { return dart_info(d).out; }

std::vector<DartRef> Diagram::all_darts() const {
    std::vector<DartRef> out;
    for (auto& [id, c] : crossings)
        for (int s = 0; s < 4; ++s) out.push_back({id, s, false});
    for (auto& [id, l] : loops) {
        out.push_back({id, 0, true});
        out.push_back({id, 1, true});
    }
    return out;
}

bool Diagram::has_dart(DartRef d) const {
    if (!d.valid()) return false;
    if (d.loop) return loops.count(d.owner) && (d.slot == 0 || d.slot == 1);
    return crossings.count(d.owner) && d.slot >= 0 && d.slot < 4;
}

DartRef Diagram::through(DartRef in) const {
    if (in.loop) return {in.owner, 0, true};
    return {in.owner, (in.slot + 2) % 4, false};
}

DartRef Diagram::smooth_through(DartRef in) const {
    if (in.loop) return {in.owner, 0, true};
    for (int delta : {1, 3}) {
        DartRef cand{in.owner, (in.slot + delta) % 4, false};
        if (is_out(cand)) return cand;
    }
    throw DiagramError("no adjacent outgoing dart at " + to_string(in));
}

int Diagram::component_of(DartRef d) const {
    reindex();
    if (d.loop) return ~d.owner;
    return comp_of_crossing_.at(d.owner);
}

std::vector<int> Diagram::component_keys() const {
    reindex();
    std::set<int> keys;
    for (auto& [id, k] : comp_of_crossing_) keys.insert(k);
    for (auto& [id, l] : loops) keys.insert(~id);
    return {keys.begin(), keys.end()};
}

std::vector<std::vector<int>> FaceSet::faces() const {
    std::vector<std::vector<int>> out(face_count);
    for (size_t w = 0; w < walks.size(); ++w) out[face_of_walk[w]].push_back((int)w);
    return out;
}

FaceSet trace_faces(const Diagram& d) {
    FaceSet fs;
    auto darts = d.all_darts();
    std::unordered_set<long long> seen;
    seen.reserve(2 * darts.size());
    auto key = [](DartRef x) {
        return (static_cast<long long>(x.owner) << 3) | (x.slot << 1) |
               (x.loop ? 1 : 0);
    };
    for (auto start : darts) {
        if (seen.count(key(start))) continue;
        std::vector<DartRef> walk;
        DartRef cur = start;
        do {
            walk.push_back(cur);
            seen.insert(key(cur));
            cur = d.phi(cur);
        } while (cur != start);
        for (auto w : walk) fs.walk_of[w] = (int)fs.walks.size();
        fs.walks.push_back(std::move(walk));
    }
    // Merge local walks across placements.
    std::vector<int> parent(fs.walks.size());
    for (size_t i = 0; i < parent.size(); ++i) parent[i] = (int)i;
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto& p : d.placements) {
        int a = find(fs.walk_of.at(p.own)), b = find(fs.walk_of.at(p.container));
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    fs.face_of_walk.assign(fs.walks.size(), -1);
    std::map<int, int> rename;
    for (size_t w = 0; w < fs.walks.size(); ++w) {
        int root = find((int)w);
        auto [it, fresh] = rename.emplace(root, (int)rename.size());
        fs.face_of_walk[w] = it->second;
    }
    fs.face_count = d.empty() ? 1 : (int)rename.size();
    return fs;
}

void Diagram::validate() const {
    reindex();
    // Every dart lies in exactly one edge; slots are fully populated.
    for (auto d : all_darts())
        (void)edge_of(d);
    for (auto& [id, e] : edges) {
        if (!has_dart(e.tail) || !has_dart(e.head))
            throw DiagramError("edge " + std::to_string(id) +
                               " references a missing dart");
        if (e.tail == e.head) throw DiagramError("degenerate edge");
    }
    if ((int)dart_edge_.size() != (int)crossings.size() * 4 + (int)loops.size() * 2)
        throw DiagramError("edge endpoints do not cover the darts exactly");
    // Loop self-edges: tail at slot 0, head at slot 1 of the same loop.
    for (auto& [id, l] : loops) {
        int e = edge_of({id, 0, true});
        if (edge_of({id, 1, true}) != e)
            throw DiagramError("free loop " + std::to_string(id) +
                               " is not a single closed edge");
        if (edge(e).tail != DartRef{id, 0, true})
            throw DiagramError("free loop " + std::to_string(id) +
                               " has inverted edge direction");
    }
    // Transversality: two incoming darts per crossing, cyclically adjacent.
    for (auto& [id, c] : crossings) {
        std::array<bool, 4> in{};
        int n_in = 0;
        for (int s = 0; s < 4; ++s) {
            in[s] = !is_out({id, s, false});
            n_in += in[s];
        }
        if (n_in != 2)
            throw DiagramError("crossing " + std::to_string(id) +
                               " does not have two incoming strands");
        bool adjacent = false;
        for (int s = 0; s < 4; ++s)
            if (in[s] && in[(s + 1) % 4]) adjacent = true;
        if (!adjacent)
            throw DiagramError("crossing " + std::to_string(id) +
                               " has opposing incoming strands");
    }
    // Euler characteristic 2 per connected map component.
    FaceSet fs = trace_faces(*this);
    std::map<int, std::array<int, 3>> vef;  // component -> V, E, F
    for (auto& [id, c] : crossings) vef[component_of({id, 0, false})][0]++;
    for (auto& [id, l] : loops) vef[~id][0]++;
    for (auto& [id, e] : edges) vef[component_of(e.tail)][1]++;
    std::set<int> counted;
    for (auto& walk : fs.walks) {
        int comp = component_of(walk.front());
        vef[comp][2]++;
        for (auto w : walk)
            if (component_of(w) != comp)
                throw DiagramError("face walk crosses components");
    }
    for (auto& [comp, c] : vef)
        if (c[0] - c[1] + c[2] != 2)
            throw DiagramError("component " + std::to_string(comp) +
                               " is not spherical (V-E+F = " +
                               std::to_string(c[0] - c[1] + c[2]) + ")");
    // Placements: a forest covering all components but one root.
    auto comps = component_keys();
    std::map<int, int> placed;  // component -> placement index
    for (size_t i = 0; i < placements.size(); ++i) {
        auto& p = placements[i];
        if (!has_dart(p.own) || !has_dart(p.container))
            throw DiagramError("placement references a missing dart");
        int a = component_of(p.own), b = component_of(p.container);
        if (a == b) throw DiagramError("component placed inside itself");
        if (placed.count(a)) throw DiagramError("component placed twice");
        placed[a] = (int)i;
    }
    if (!comps.empty() && (int)placements.size() != (int)comps.size() - 1)
        throw DiagramError("expected " + std::to_string(comps.size() - 1) +
                           " placements, found " + std::to_string(placements.size()));
    // Acyclicity of the containment relation.
    for (int c : comps) {
        int cur = c, steps = 0;
        while (placed.count(cur)) {
            cur = component_of(placements[placed[cur]].container);
            if (++steps > (int)comps.size())
                throw DiagramError("placement containment is cyclic");
        }
    }
}

Diagram build_diagram(const std::vector<CrossingRecord>& crossings,
                      const std::vector<LoopRecord>& loops,
                      const std::vector<PlacementRecord>& placements) {
    Diagram d;
    struct End {
        DartRef dart;
        bool incoming;
    };
    std::map<int, std::vector<End>> by_edge;
    for (auto& cr : crossings) {
        if (d.crossings.count(cr.id))
            throw DiagramError("duplicate crossing id " + std::to_string(cr.id));
        d.crossings[cr.id] = {cr.id, cr.tag};
        for (int s = 0; s < 4; ++s)
            by_edge[cr.ends[s].edge_id].push_back(
                {DartRef{cr.id, s, false}, cr.ends[s].incoming});
    }
    for (auto& lr : loops) {
        if (d.loops.count(lr.id))
            throw DiagramError("duplicate loop id " + std::to_string(lr.id));
        d.loops[lr.id] = {lr.id};
    }
    for (auto& [eid, ends] : by_edge) {
        if (ends.size() != 2 || ends[0].incoming == ends[1].incoming)
            throw DiagramError("edge " + std::to_string(eid) +
                               " must occur exactly twice, once in and once out");
        const End& out = ends[0].incoming ? ends[1] : ends[0];
        const End& in = ends[0].incoming ? ends[0] : ends[1];
        d.edges[eid] = {eid, out.dart, in.dart};
    }
    for (auto& lr : loops) {
        int eid = d.edges.empty() ? 0 : d.edges.rbegin()->first + 1;
        d.edges[eid] = {eid, DartRef{lr.id, 0, true}, DartRef{lr.id, 1, true}};
    }
    for (auto& lr : loops)
        if (lr.container.valid())
            d.placements.push_back(
                {DartRef{lr.id, lr.own_head_side ? 1 : 0, true}, lr.container});
    for (auto& p : placements) d.placements.push_back({p.own, p.container});
    d.touch();
    d.validate();
    return d;
}

}  // namespace gkd
