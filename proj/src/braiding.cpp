#include "gkd/braiding.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "gkd/seifert.hpp"

namespace gkd {

namespace {

void check(bool cond, const std::string& msg) {
    if (!cond) throw BraidError(msg);
}

}  // namespace

bool is_braided(const Diagram& d) { return height(d) == 0; }

BraidResult braid(const Diagram& d, const Theory& t) {
    check(classify(t).regular, "braiding needs a regular theory");
    SignedTag x{t.braiding_tag, true};
    BraidResult res{{d, {}}, d};
    while (true) {
        SeifertStructure s = smooth(res.diagram);
        auto site = find_vogel_site(s);
        if (!site) break;
        auto dart_on = [&](int eid) {
            const Edge& e = res.diagram.edge(eid);
            if (s.regions.face_of(e.tail) == site->region) return e.tail;
            check(s.regions.face_of(e.head) == site->region,
                  "vogel arc does not border the site region");
            return e.head;
        };
        MoveRecord m{MoveKind::V, +1, {x},
                     {dart_on(site->arc_a), dart_on(site->arc_b)}, {}, 0};
        ApplyResult ar = apply_move(res.diagram, m, t);
        res.sequence.moves.push_back(ar.applied);
        res.diagram = std::move(ar.diagram);
    }
    return res;
}

Diagram closure(const BraidWord& w, const Theory& t) {
    int n = w.strands;
    check(n >= 1, "braid word needs at least one strand");
    for (auto& [i, tag] : w.letters) {
        check(i >= 1 && i < n, "letter index out of range");
        check(t.has_tag(tag.letter), "letter tag not in theory");
    }

    // Positions joined by a letter share a component; components are
    // maximal intervals.
    std::vector<bool> linked(n + 1, false);  // linked[i]: i and i+1 joined
    for (auto& [i, tag] : w.letters) linked[i] = true;

    // Crossings in word order, with open edge ids per strand position as
    // in a standard braid reading; dangling ends are renamed together to
    // close the circles.
    int next_edge = 0;
    std::vector<int> open(n + 1), initial(n + 1);
    for (int p = 1; p <= n; ++p) open[p] = initial[p] = next_edge++;
    std::vector<CrossingRecord> recs;
    std::vector<int> letter_index;  // crossing id -> generator index
    int cid = 0;
    for (auto& [i, tag] : w.letters) {
        int up = open[i + 1], lo = open[i];
        int a = next_edge++, b = next_edge++;
        recs.push_back(
            {cid, tag, {{{a, false}, {up, true}, {lo, true}, {b, false}}}});
        letter_index.push_back(i);
        open[i + 1] = a;
        open[i] = b;
        ++cid;
    }
    std::map<int, int> rename;
    std::vector<LoopRecord> loop_recs;
    for (int p = 1; p <= n; ++p) {
        if (open[p] != initial[p]) rename[initial[p]] = open[p];
    }
    for (auto& r : recs)
        for (auto& e : r.ends)
            if (auto it = rename.find(e.edge_id); it != rename.end())
                e.edge_id = it->second;

    // Nest the components: the bottom strand's right side faces the inner
    // pole, so component k+1's inner face is glued to component k's outer
    // face.  A crossing component's inner dart is slot 3 of a crossing on
    // its lowest index, its outer dart slot 1 of one on its highest.
    std::vector<PlacementRecord> placements;
    DartRef below;  // outer dart of the component underneath
    int p = 1;
    while (p <= n) {
        if (p < n && linked[p]) {
            int q = p;
            while (q < n && linked[q]) ++q;  // component spans [p, q]
            DartRef inner, outer;
            for (int c = 0; c < (int)letter_index.size(); ++c) {
                if (letter_index[c] == p && !inner.valid())
                    inner = {c, 3, false};
                if (letter_index[c] == q - 1 && !outer.valid())
                    outer = {c, 1, false};
            }
            if (below.valid()) placements.push_back({inner, below});
            below = outer;
            p = q + 1;
        } else {
            loop_recs.push_back({p, below, false});
            below = {p, 1, true};
            ++p;
        }
    }
    return build_diagram(recs, loop_recs, placements);
}

BraidWord extract_word(const Diagram& d) {
    check(!d.empty(), "cannot read a braid word off an empty diagram");
    check(is_braided(d), "diagram is not braided");
    SeifertStructure s = smooth(d);
    int k = (int)s.cycles.size();

    // The zone tree of a braided diagram is a path; walk it from the pole
    // that is the right zone of its cycle, giving the strand order.
    std::map<int, std::vector<int>> at_zone;
    for (auto& c : s.cycles) {
        at_zone[s.left_zone(c.id)].push_back(c.id);
        at_zone[s.right_zone(c.id)].push_back(c.id);
    }
    std::vector<int> leaves;
    for (auto& [z, cs] : at_zone) {
        check(cs.size() <= 2, "braided diagram is not a nest of cycles");
        if (cs.size() == 1) leaves.push_back(z);
    }
    check(leaves.size() == 2, "braided diagram is not a nest of cycles");
    int start = -1;
    for (int z : leaves)
        if (s.right_zone(at_zone[z][0]) == z) start = z;
    check(start >= 0, "no inner pole in the cycle nest");

    std::vector<int> order;
    std::map<int, int> pos;  // cycle id -> strand (1-based)
    int zcur = start, prev = -1;
    for (int step = 0; step < k; ++step) {
        int c = -1;
        for (int cand : at_zone[zcur])
            if (cand != prev) c = cand;
        check(c >= 0, "broken cycle nest");
        check(s.right_zone(c) == zcur, "incoherent cycle nest");
        order.push_back(c);
        pos[c] = step + 1;
        prev = c;
        zcur = s.left_zone(c);
    }

    // Cut path from the inner pole outwards, crossing each cycle at one
    // arc; the arc fixes where each circle's bridge order starts.
    int region = -1;
    for (int r : s.polar_regions)
        if (s.region_cycles[r] == std::set<int>{order[0]} &&
            (region < 0 || r < region))
            region = r;
    check(region >= 0, "no polar region inside the first cycle");
    std::map<int, int> cut_arc;  // cycle id -> edge id
    auto face_walks = s.regions.faces();
    for (int i = 0; i < k; ++i) {
        int best = -1;
        for (auto& w : face_walks[region])
            for (auto& x : s.regions.walks[w]) {
                int e = d.edge_of(x);
                if (s.cycle_of_edge.at(e) != order[i]) continue;
                if (best < 0 || e < best) best = e;
            }
        check(best >= 0, "cut path cannot reach the next cycle");
        cut_arc[order[i]] = best;
        const Edge& e = d.edge(best);
        region = s.regions.face_of(e.tail) == region
                     ? s.regions.face_of(e.head)
                     : s.regions.face_of(e.tail);
    }

    // Rank each bridge on both of its cycles, counted from the cut arc.
    std::map<int, std::map<int, int>> edge_pos;  // cycle -> edge -> index
    for (auto& c : s.cycles)
        for (int i = 0; i < (int)c.edges.size(); ++i)
            edge_pos[c.id][c.edges[i]] = i;
    auto rank = [&](int cycle, int arc) {
        auto& idx = edge_pos[cycle];
        int l = (int)idx.size();
        return (idx.at(arc) - idx.at(cut_arc.at(cycle)) + l) % l;
    };

    int nb = (int)s.bridges.size();
    std::vector<std::vector<int>> succ(nb);
    std::vector<int> indeg(nb, 0);
    std::map<int, std::vector<std::pair<int, int>>> per_cycle;  // (rank, b)
    for (int b = 0; b < nb; ++b) {
        const SeifertBridge& br = s.bridges[b];
        check(std::abs(pos.at(br.cycle_from) - pos.at(br.cycle_to)) == 1,
              "bridge joins non-adjacent cycles");
        per_cycle[br.cycle_from].push_back({rank(br.cycle_from, br.arc_from), b});
        per_cycle[br.cycle_to].push_back({rank(br.cycle_to, br.arc_to), b});
    }
    for (auto& [c, lst] : per_cycle) {
        std::sort(lst.begin(), lst.end());
        for (size_t i = 1; i < lst.size(); ++i) {
            succ[lst[i - 1].second].push_back(lst[i].second);
            ++indeg[lst[i].second];
        }
    }
    // Kahn's sort, smallest crossing id first among the ready bridges.
    std::set<std::pair<int, int>> ready;  // (crossing id, bridge index)
    for (int b = 0; b < nb; ++b)
        if (indeg[b] == 0) ready.insert({s.bridges[b].crossing, b});
    BraidWord w{k, {}};
    while (!ready.empty()) {
        int b = ready.begin()->second;
        ready.erase(ready.begin());
        const SeifertBridge& br = s.bridges[b];
        w.letters.push_back(
            {std::min(pos.at(br.cycle_from), pos.at(br.cycle_to)), br.tag});
        for (int nx : succ[b])
            if (--indeg[nx] == 0) ready.insert({s.bridges[nx].crossing, nx});
    }
    check((int)w.letters.size() == nb, "bridge order has a cycle");
    return w;
}

}  // namespace gkd
