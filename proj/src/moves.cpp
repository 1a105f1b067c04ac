#include "gkd/moves.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "gkd/canonical.hpp"
#include "gkd/seifert.hpp"

namespace gkd {

std::string to_string(MoveKind k) {
    switch (k) {
        case MoveKind::R1: return "R1";
        case MoveKind::R2p: return "R2'";
        case MoveKind::R2pp: return "R2''";
        case MoveKind::V: return "V";
        case MoveKind::R3p: return "R3'";
        case MoveKind::R3pp: return "R3''";
        case MoveKind::R4: return "R4";
        case MoveKind::MarkovR1: return "MarkovR1";
    }
    throw MoveError("bad move kind");
}

MoveKind parse_move_kind(const std::string& s) {
    if (s == "R1") return MoveKind::R1;
    if (s == "R2'") return MoveKind::R2p;
    if (s == "R2''") return MoveKind::R2pp;
    if (s == "V") return MoveKind::V;
    if (s == "R3'") return MoveKind::R3p;
    if (s == "R3''") return MoveKind::R3pp;
    if (s == "R4") return MoveKind::R4;
    if (s == "MarkovR1") return MoveKind::MarkovR1;
    throw MoveError("unknown move kind '" + s + "'");
}

namespace {

void need(bool cond, const std::string& msg) {
    if (!cond) throw MoveError(msg);
}

std::vector<DartRef> orbit(const Diagram& d, DartRef start) {
    std::vector<DartRef> o;
    DartRef cur = start;
    do {
        o.push_back(cur);
        cur = d.phi(cur);
    } while (cur != start && o.size() <= d.edges.size() * 2 + 2);
    return o;
}

bool on_crossings(DartRef x, const std::set<int>& cids) {
    return !x.loop && cids.count(x.owner) != 0;
}

// No placement may sit on the swept face (referenced by `face_darts`).
void require_face_empty(const Diagram& d, const std::vector<DartRef>& face_darts,
                        const std::string& what) {
    std::set<DartRef> on(face_darts.begin(), face_darts.end());
    for (const auto& p : d.placements)
        need(!on.count(p.own) && !on.count(p.container),
             what + " holds a placed component");
}

int find_edge_with_head(const Diagram& d, DartRef h) {
    for (auto& [id, e] : d.edges)
        if (e.head == h) return id;
    throw MoveError("dangling dart");
}

int find_edge_with_tail(const Diagram& d, DartRef t) {
    for (auto& [id, e] : d.edges)
        if (e.tail == t) return id;
    throw MoveError("dangling dart");
}

// Deletes a set of crossings and splices every strand passing through them.
// Strands with both ends outside the set are merged into their entry edge;
// strands entirely inside become fresh free loops.  Placement endpoints on
// the dying darts are re-anchored to a surviving dart of the same local
// face (faces only merge here, so any survivor denotes the same region).
struct DissolveInfo {
    std::map<int, int> merged_edge_of_entry;  // entry edge id -> same id
    std::map<int, int> loop_of_interior;      // interior edge id -> loop id
};

DissolveInfo dissolve(Diagram& nd, const Diagram& pre, const std::set<int>& cids,
                      const std::set<int>& swept) {
    DissolveInfo info;
    FaceSet faces = trace_faces(pre);

    // Walk survivors for placement re-anchoring.
    std::vector<DartRef> survivor(faces.walks.size(), DartRef{});
    for (size_t w = 0; w < faces.walks.size(); ++w)
        for (const auto& x : faces.walks[w])
            if (!on_crossings(x, cids)) {
                survivor[w] = x;
                break;
            }

    // Side claims for walks whose every dart dies: the swept edges (those
    // bounding the vanishing monogon/bigon) move during the isotopy and
    // say nothing about sides; every other chain edge keeps its left and
    // right, now the sides of the spliced strand.
    std::map<size_t, DartRef> walk_repl;
    auto claim = [&](int chain_edge, DartRef tail_repl, DartRef head_repl) {
        if (swept.count(chain_edge)) return;
        walk_repl.emplace(faces.walk_of.at(pre.edge(chain_edge).tail), tail_repl);
        walk_repl.emplace(faces.walk_of.at(pre.edge(chain_edge).head), head_repl);
    };

    // Open chains: entry edge -> ... -> exit edge.
    std::set<int> consumed;
    std::vector<std::pair<int, DartRef>> rewires;  // entry edge -> new head
    for (auto& [eid, e] : pre.edges) {
        if (!on_crossings(e.head, cids) || on_crossings(e.tail, cids)) continue;
        std::vector<int> chain{eid};
        int cur = eid;
        for (;;) {
            DartRef out = pre.through(pre.edge(cur).head);
            int nxt = find_edge_with_tail(pre, out);
            consumed.insert(nxt);
            if (on_crossings(pre.edge(nxt).head, cids)) {
                chain.push_back(nxt);
                cur = nxt;
            } else {
                rewires.push_back({eid, pre.edge(nxt).head});
                info.merged_edge_of_entry[eid] = eid;
                for (int ce : chain)
                    claim(ce, e.tail, pre.edge(nxt).head);
                break;
            }
        }
    }

    // Closed chains become free loops.
    for (auto& [eid, e] : pre.edges) {
        if (consumed.count(eid)) continue;
        if (!on_crossings(e.head, cids) || !on_crossings(e.tail, cids)) continue;
        int loop = nd.add_loop();
        nd.add_edge({loop, 0, true}, {loop, 1, true});
        int cur = eid;
        do {
            consumed.insert(cur);
            info.loop_of_interior[cur] = loop;
            claim(cur, {loop, 0, true}, {loop, 1, true});
            cur = find_edge_with_tail(pre, pre.through(pre.edge(cur).head));
        } while (cur != eid);
    }

    for (auto& [eid, h] : rewires) nd.edges.at(eid).head = h;
    for (int eid : consumed)
        if (!info.merged_edge_of_entry.count(eid)) nd.remove_edge(eid);
    for (int cid : cids) nd.remove_crossing(cid);

    for (auto& p : nd.placements)
        for (DartRef* x : {&p.own, &p.container}) {
            if (!on_crossings(*x, cids)) continue;
            size_t w = faces.walk_of.at(*x);
            if (survivor[w].valid())
                *x = survivor[w];
            else if (auto it = walk_repl.find(w); it != walk_repl.end())
                *x = it->second;
            else
                throw MoveError("cannot re-anchor a placement at this locus");
        }
    nd.touch();
    return info;
}

// The dart of the spliced strand that faces the region the pre-move dart
// `x` (on a dying middle edge) faced.  The other strand of the bigon
// crosses ours at every dying crossing, so the region between them sits on
// alternating sides of the strand: walking back to an unmoved edge flips
// the side once per crossing.
DartRef spliced_side_dart(const Diagram& nd, const Diagram& pre,
                          const DissolveInfo& info,
                          const std::set<int>& swept, DartRef x) {
    int eid = pre.edge_of(x);
    bool tail_side = pre.is_out(x);
    auto step_back = [&](int e) {
        // The in dart pairing this tail sits two slots around.
        DartRef in{pre.edge(e).tail.owner, (pre.edge(e).tail.slot + 2) % 4};
        return pre.edge_of(in);
    };
    if (auto it = info.loop_of_interior.find(eid); it != info.loop_of_interior.end()) {
        // Closed chain: the loop's dart orientation is anchored by the
        // claims of the unmoved (non-swept) chain edges.
        int cur = eid;
        while (swept.count(cur)) {
            cur = step_back(cur);
            tail_side = !tail_side;
            need(cur != eid, "no unmoved edge anchors this strand");
        }
        return {it->second, tail_side ? 0 : 1, true};
    }
    // Open chain: walk back to the unmoved entry stub of the merged edge.
    int cur = eid;
    while (!info.merged_edge_of_entry.count(cur)) {
        cur = step_back(cur);
        tail_side = !tail_side;
    }
    const Edge& e = nd.edge(cur);
    return tail_side ? e.tail : e.head;
}

int components_of(const Diagram& d) { return (int)d.component_keys().size(); }

// After a deletion the affected component may fall apart into two pieces;
// join them with a placement through the merged face, using the spliced
// side darts of the two dying middle edges.
void repair_split(Diagram& nd, const Diagram& pre, int pre_comps,
                  DartRef rep1, DartRef rep2) {
    int post = components_of(nd);
    if (post == pre_comps) return;
    need(post == pre_comps + 1, "unexpected component change");
    int c1 = nd.component_of(rep1), c2 = nd.component_of(rep2);
    need(c1 != c2, "cannot place the severed component");
    // The piece keeping the split component's old tie stays the own side
    // of that tie; the new tie hangs the other piece next to it.
    std::set<int> placed;
    for (auto& p : nd.placements) placed.insert(nd.component_of(p.own));
    if (placed.count(c2)) {
        need(!placed.count(c1), "both severed pieces carry a placement");
        nd.placements.push_back({rep1, rep2});
    } else {
        nd.placements.push_back({rep2, rep1});
    }
    nd.touch();
}

bool is_polar_face(const SeifertStructure& s, int face) {
    return std::find(s.polar_regions.begin(), s.polar_regions.end(), face) !=
           s.polar_regions.end();
}

// ---------------------------------------------------------------- R1 +

ApplyResult apply_r1_plus(const Diagram& d, const MoveRecord& m, const Theory& t) {
    need(m.edges.size() == 1 && m.darts.size() == 1 && m.tags.size() == 1,
         "R1+ locus: one edge, one side dart, one tag");
    auto eit = d.edges.find(m.edges[0]);
    need(eit != d.edges.end(), "R1+ edge does not exist");
    const Edge e = eit->second;
    DartRef side = m.darts[0];
    need(side == e.head || side == e.tail, "R1+ side dart not on the edge");
    const bool left = (side == e.head);
    SignedTag tag = m.tags[0];
    need(t.has_tag(tag.letter), "foreign tag");
    need(t.r1_allowed(tag), "R1 not allowed for this tag");

    if (m.kind == MoveKind::MarkovR1) {
        need(height(d) == 0, "Markov R1 requires a braided diagram");
        SeifertStructure s = smooth(d);
        need(is_polar_face(s, s.regions.face_of(side)),
             "Markov R1 monogon must lie in a polar region");
    }

    ApplyResult res;
    Diagram& nd = res.diagram;
    nd = d;
    int c = nd.add_crossing(tag);
    DartRef monogon;
    if (e.tail.loop) {
        int L = e.tail.owner;
        nd.remove_edge(e.id);
        nd.remove_loop(L);
        int big, mid;
        if (left) {
            big = nd.add_edge({c, 0}, {c, 3});
            mid = nd.add_edge({c, 1}, {c, 2});
            monogon = {c, 2};
        } else {
            big = nd.add_edge({c, 0}, {c, 1});
            mid = nd.add_edge({c, 3}, {c, 2});
            monogon = {c, 3};
        }
        (void)mid;
        (void)big;
        DartRef right_repl{c, 0}, left_repl = left ? DartRef{c, 3} : DartRef{c, 1};
        for (auto& p : nd.placements)
            for (DartRef* x : {&p.own, &p.container})
                if (x->loop && x->owner == L) *x = (x->slot == 0) ? right_repl : left_repl;
    } else {
        if (left) {
            nd.edges.at(e.id).head = {c, 3};
            nd.add_edge({c, 0}, e.head);
            nd.add_edge({c, 1}, {c, 2});
            monogon = {c, 2};
        } else {
            nd.edges.at(e.id).head = {c, 1};
            nd.add_edge({c, 0}, e.head);
            nd.add_edge({c, 3}, {c, 2});
            monogon = {c, 3};
        }
    }
    nd.touch();

    res.inverse.kind = m.kind;
    res.inverse.sign = -1;
    res.inverse.tags = {tag};
    res.inverse.darts = {monogon};
    return res;
}

// ---------------------------------------------------------------- R1 -

ApplyResult apply_r1_minus(const Diagram& d, const MoveRecord& m, const Theory& t) {
    need(m.darts.size() == 1, "R1- locus: the monogon dart");
    DartRef md = m.darts[0];
    need(d.has_dart(md) && !md.loop, "R1- dart must sit on a crossing");
    auto orb = orbit(d, md);
    need(orb.size() == 1, "R1- locus is not a monogon");
    int c = md.owner;
    SignedTag tag = d.crossings.at(c).tag;
    need(m.tags.empty() || m.tags[0] == tag, "R1- tag mismatch");
    need(t.r1_allowed(tag), "R1 not allowed for this tag");
    require_face_empty(d, orb, "monogon");

    const Edge& mid = d.edge(d.edge_of(md));
    bool left = (md == mid.head);

    ApplyResult res;
    Diagram& nd = res.diagram;
    nd = d;
    int pre_comps = components_of(d);
    DissolveInfo info = dissolve(nd, d, {c}, {mid.id});
    need(components_of(nd) == pre_comps, "R1- changed connectivity");

    // Inverse: recreate the kink on the same side of the merged edge.
    DartRef in_dart{c, (mid.tail.slot + 2) % 4};
    int entry = d.edge_of(in_dart);
    res.inverse.kind = m.kind;
    res.inverse.sign = +1;
    res.inverse.tags = {tag};
    if (auto it = info.loop_of_interior.find(entry); it != info.loop_of_interior.end()) {
        int self = nd.edge_of(DartRef{it->second, 0, true});
        res.inverse.edges = {self};
        res.inverse.darts = {left ? nd.edge(self).head : nd.edge(self).tail};
    } else {
        res.inverse.edges = {entry};
        res.inverse.darts = {left ? nd.edge(entry).head : nd.edge(entry).tail};
    }
    return res;
}

// ---------------------------------------------------------------- R2 +

ApplyResult apply_r2_plus(const Diagram& d, const MoveRecord& m, const Theory& t) {
    need(m.darts.size() == 2 && m.tags.size() == 1,
         "R2+ locus: two face darts and one tag");
    DartRef d1 = m.darts[0], d2 = m.darts[1];
    need(d.has_dart(d1) && d.has_dart(d2) && d1 != d2, "bad R2+ darts");
    int ea = d.edge_of(d1), eb = d.edge_of(d2);
    need(ea != eb, "R2+ needs two distinct edges");
    FaceSet faces = trace_faces(d);
    need(faces.face_of(d1) == faces.face_of(d2), "R2+ darts not on one face");
    SignedTag a = m.tags[0];
    need(t.has_tag(a.letter), "foreign tag");
    need(t.r2_allowed(a.letter), "R2 not allowed for this tag");

    bool o1 = d.is_out(d1), o2 = d.is_out(d2);
    bool p_gets_a = true;  // P is the first crossing along (normalized) d1
    if (o1 == o2) {
        SeifertStructure s = smooth(d);
        bool distinct = s.cycle_of_edge.at(ea) != s.cycle_of_edge.at(eb);
        if (m.kind == MoveKind::V)
            need(distinct, "V+ needs arcs of distinct cycles");
        else
            need(m.kind == MoveKind::R2pp && !distinct,
                 "same-type R2+ is R2'' (V when the cycles differ)");
    } else {
        need(m.kind == MoveKind::R2p, "opposite-type R2+ is R2'");
        if (!o1) {  // normalize: d1 carries the tail-type dart
            std::swap(d1, d2);
            std::swap(ea, eb);
            std::swap(o1, o2);
            p_gets_a = false;  // tags[0] still belongs to the given d1's strand
        }
    }

    const Edge E1 = d.edge(ea), E2 = d.edge(eb);
    ApplyResult res;
    Diagram& nd = res.diagram;
    nd = d;
    SignedTag tp = p_gets_a ? a : bar(a), tq = bar(tp);
    int P = nd.add_crossing(tp), Q = nd.add_crossing(tq);

    // Wiring tables; P is the first crossing along strand 1 (= d1's edge).
    DartRef e1a_h, e1b_t, e2a_h, e2b_t, m1t, m1h, m2t, m2h, bigon;
    if (o1 && o2) {  // both tails: the face lies right of both edges
        e2b_t = {P, 2}; e1a_h = {P, 1}; m2h = {P, 0}; m1t = {P, 3};
        e2a_h = {Q, 0}; e1b_t = {Q, 1}; m2t = {Q, 2}; m1h = {Q, 3};
        bigon = {P, 0};
    } else if (!o1 && !o2) {  // both heads: the face lies left of both
        e2b_t = {P, 0}; e1a_h = {P, 1}; m2h = {P, 2}; m1t = {P, 3};
        e2a_h = {Q, 2}; e1b_t = {Q, 1}; m2t = {Q, 0}; m1h = {Q, 3};
        bigon = {P, 3};
    } else {  // R2': right of strand 1, left of strand 2
        e2a_h = {P, 2}; e1a_h = {P, 1}; m2t = {P, 0}; m1t = {P, 3};
        e2b_t = {Q, 0}; e1b_t = {Q, 1}; m2h = {Q, 2}; m1h = {Q, 3};
        bigon = {P, 0};
    }

    auto split = [&](int eid, const Edge& E, DartRef in_h, DartRef out_t) {
        // Replace E by (tail -> in_h) and (out_t -> head); a closed loop
        // edge yields the single edge (out_t -> in_h) and drops its loop.
        if (E.tail.loop) {
            int L = E.tail.owner;
            nd.edges.at(eid).tail = out_t;
            nd.edges.at(eid).head = in_h;
            nd.remove_loop(L);
            for (auto& p : nd.placements)
                for (DartRef* x : {&p.own, &p.container})
                    if (x->loop && x->owner == L) *x = (x->slot == 0) ? out_t : in_h;
        } else {
            nd.edges.at(eid).head = in_h;
            nd.add_edge(out_t, E.head);
        }
    };
    split(ea, E1, e1a_h, e1b_t);
    split(eb, E2, e2a_h, e2b_t);
    nd.add_edge(m1t, m1h);
    nd.add_edge(m2t, m2h);

    // Joining two components makes the placement between them internal;
    // if both carried a placement of their own (the container faces merged,
    // so either tie still holds), the duplicate is dropped too.
    nd.touch();
    std::set<int> placed;
    std::erase_if(nd.placements, [&](const Placement& p) {
        int co = nd.component_of(p.own), cc = nd.component_of(p.container);
        if (co == cc) return true;
        return !placed.insert(co).second;
    });
    nd.touch();
    try {
        nd.validate();
    } catch (const DiagramError& e) {
        throw MoveError(std::string("push tangles the placements: ") +
                        e.what());
    }

    res.inverse.kind = m.kind;
    res.inverse.sign = -1;
    res.inverse.tags = {tp, tq};
    res.inverse.darts = {bigon};
    return res;
}

// ---------------------------------------------------------------- R2 -

struct R2MinusSurgery {
    Diagram nd;
    DartRef rep1, rep2;  // spliced strand darts facing the merged face
};

R2MinusSurgery r2_minus_surgery(const Diagram& d, DartRef x, DartRef y) {
    R2MinusSurgery s;
    s.nd = d;
    int pre_comps = components_of(d);
    std::set<int> swept{d.edge_of(x), d.edge_of(y)};
    DissolveInfo info = dissolve(s.nd, d, {x.owner, y.owner}, swept);
    s.rep1 = spliced_side_dart(s.nd, d, info, swept, x);
    s.rep2 = spliced_side_dart(s.nd, d, info, swept, y);
    repair_split(s.nd, d, pre_comps, s.rep1, s.rep2);
    return s;
}

MoveKind classify_r2_minus(const Diagram& d, DartRef x, DartRef y) {
    if (d.is_out(x) != d.is_out(y)) return MoveKind::R2p;
    R2MinusSurgery s = r2_minus_surgery(d, x, y);
    SeifertStructure sm = smooth(s.nd);
    bool same = sm.cycle_of_edge.at(s.nd.edge_of(s.rep1)) ==
                sm.cycle_of_edge.at(s.nd.edge_of(s.rep2));
    return same ? MoveKind::R2pp : MoveKind::V;
}

ApplyResult apply_r2_minus(const Diagram& d, const MoveRecord& m, const Theory& t) {
    need(m.darts.size() == 1, "R2- locus: one bigon dart");
    DartRef x = m.darts[0];
    need(d.has_dart(x) && !x.loop, "bad R2- dart");
    auto orb = orbit(d, x);
    need(orb.size() == 2, "R2- locus is not a bigon");
    DartRef y = orb[1];
    need(!y.loop && y.owner != x.owner, "R2- bigon must join two crossings");
    SignedTag tx = d.crossings.at(x.owner).tag, ty = d.crossings.at(y.owner).tag;
    need(t.canon(tx) == t.canon(bar(ty)), "R2- crossings must carry (a, ~a)");
    need(t.r2_allowed(tx.letter), "R2 not allowed for this tag");
    require_face_empty(d, orb, "bigon");
    MoveKind kind = classify_r2_minus(d, x, y);
    need(m.kind == kind, "R2- kind mismatch: this bigon deletes as " +
                             to_string(kind));

    ApplyResult res;
    R2MinusSurgery s = r2_minus_surgery(d, x, y);
    res.diagram = std::move(s.nd);

    // Inverse creation: tags[0] goes to the first crossing along the
    // strand of the first listed dart.
    DartRef i1 = s.rep1, i2 = s.rep2;
    SignedTag a = d.crossings.at(d.edge(d.edge_of(x)).tail.owner).tag;
    if (!res.diagram.is_out(i1) && res.diagram.is_out(i2)) {
        std::swap(i1, i2);
        a = d.crossings.at(d.edge(d.edge_of(y)).tail.owner).tag;
    }
    res.inverse.kind = kind;
    res.inverse.sign = +1;
    res.inverse.tags = {a};
    res.inverse.darts = {i1, i2};
    return res;
}

// ---------------------------------------------------------------- R3

ApplyResult apply_r3(const Diagram& d, const MoveRecord& m, const Theory& t) {
    need(m.darts.size() == 1, "R3 locus: one trigon dart");
    DartRef x = m.darts[0];
    need(d.has_dart(x) && !x.loop, "bad R3 dart");
    auto orb = orbit(d, x);
    need(orb.size() == 3, "R3 locus is not a trigon");
    std::set<int> cids, eids;
    for (auto& o : orb) {
        need(!o.loop, "R3 trigon must be bounded by crossings");
        cids.insert(o.owner);
        eids.insert(d.edge_of(o));
    }
    need(cids.size() == 3, "R3 trigon needs three distinct crossings");
    need(eids.size() == 3, "degenerate trigon");
    require_face_empty(d, orb, "trigon");

    int outs = 0;
    for (auto& o : orb) outs += d.is_out(o) ? 1 : 0;
    bool oriented = (outs == 0 || outs == 3);

    auto reading = [&](DartRef mover_dart) {
        const Edge& me = d.edge(d.edge_of(mover_dart));
        int first = me.tail.owner, second = me.head.owner;
        int third = -1;
        for (int c : cids)
            if (c != first && c != second) third = c;
        return std::array<SignedTag, 3>{d.crossings.at(first).tag,
                                        d.crossings.at(second).tag,
                                        d.crossings.at(third).tag};
    };

    if (oriented) {
        need(m.kind == MoveKind::R3pp, "oriented trigon is an R3'' locus");
        need(t.r3_double_from_single, "R3'' not derivable in this theory");
        bool ok = false;
        for (auto& o : orb) {
            auto r = reading(o);
            ok = ok || t.r3_allowed(r[0], r[1], r[2]);
        }
        need(ok, "R3'' not allowed for these tags");
    } else {
        need(m.kind == MoveKind::R3p, "mixed trigon is an R3' locus");
        DartRef minority;
        for (auto& o : orb) {
            int same = 0;
            for (auto& p : orb)
                if (d.is_out(p) == d.is_out(o)) ++same;
            if (same == 1) minority = o;
        }
        auto r = reading(minority);
        need(t.r3_allowed(r[0], r[1], r[2]),
             "R3' not allowed: (" + to_string(r[0]) + ", " + to_string(r[1]) +
                 ", " + to_string(r[2]) + ")");
    }

    // Surgery: every strand swaps the order of its two trigon crossings.
    ApplyResult res;
    Diagram& nd = res.diagram;
    nd = d;
    FaceSet faces = trace_faces(d);
    std::map<int, std::pair<std::optional<DartRef>, std::optional<DartRef>>> retarget;
    for (auto& o : orb) {
        const Edge mid = d.edge(d.edge_of(o));
        int X = mid.tail.owner, Y = mid.head.owner;
        int xout = mid.tail.slot, yin = mid.head.slot;
        int xin = (xout + 2) % 4, yout = (yin + 2) % 4;
        int stub_in = find_edge_with_head(d, {X, xin});
        int stub_out = find_edge_with_tail(d, {Y, yout});
        retarget[stub_in].second = DartRef{Y, yin};
        retarget[stub_out].first = DartRef{X, xout};
        retarget[mid.id].first = DartRef{Y, yout};
        retarget[mid.id].second = DartRef{X, xin};
    }
    for (auto& [eid, th] : retarget) {
        if (th.first) nd.edges.at(eid).tail = *th.first;
        if (th.second) nd.edges.at(eid).head = *th.second;
    }
    nd.touch();

    // Re-anchor placements sitting on the three crossings: the corner
    // faces there reshuffle, so point at an untouched dart of the same
    // pre-move face.
    std::vector<DartRef> survivor(faces.walks.size(), DartRef{});
    for (size_t w = 0; w < faces.walks.size(); ++w)
        for (const auto& dd : faces.walks[w])
            if (!on_crossings(dd, cids)) {
                survivor[w] = dd;
                break;
            }
    for (auto& p : nd.placements)
        for (DartRef* e : {&p.own, &p.container}) {
            if (!on_crossings(*e, cids)) continue;
            DartRef s = survivor[faces.walk_of.at(*e)];
            need(s.valid(), "cannot re-anchor a placement at this locus");
            *e = s;
        }
    nd.touch();

    // An oriented trigon's sides smooth into a full cycle, and flipping
    // it can rewire that cycle against the rest of the diagram.  R3'' is
    // only the h-neutral instance of the flip, so anything else is not
    // an R3'' locus.
    if (oriented)
        need(height(nd) == height(d), "flipping this trigon changes h: not an R3'' locus");

    // The trigon flips across the stationary crossing of (any) mover:
    // its new corner there is the opposite one.
    DartRef z = x;  // any orbit dart works: compute via its own crossing
    res.inverse = m;
    res.inverse.darts = {DartRef{z.owner, (z.slot + 2) % 4}};
    res.inverse.tags.clear();
    return res;
}

// ---------------------------------------------------------------- R4

ApplyResult apply_r4(const Diagram& d, const MoveRecord& m, const Theory& t) {
    need(m.darts.size() == 1, "R4 locus: one bigon dart");
    DartRef x = m.darts[0];
    need(d.has_dart(x) && !x.loop, "bad R4 dart");
    auto orb = orbit(d, x);
    need(orb.size() == 2, "R4 locus is not a bigon");
    DartRef y = orb[1];
    need(!y.loop && y.owner != x.owner, "R4 bigon must join two crossings");
    SignedTag tx = d.crossings.at(x.owner).tag, ty = d.crossings.at(y.owner).tag;
    need(t.r4_allowed(tx, ty), "R4 not allowed for these tags");
    require_face_empty(d, orb, "bigon");

    ApplyResult res;
    res.diagram = d;
    std::swap(res.diagram.crossings.at(x.owner).tag,
              res.diagram.crossings.at(y.owner).tag);
    res.diagram.touch();
    res.inverse = m;
    res.inverse.tags = {ty, tx};
    return res;
}

}  // namespace

ApplyResult apply_move(const Diagram& d, const MoveRecord& m, const Theory& t) {
    ApplyResult res;
    switch (m.kind) {
        case MoveKind::R1:
        case MoveKind::MarkovR1:
            need(m.sign == 1 || m.sign == -1, "R1 needs a sign");
            res = m.sign > 0 ? apply_r1_plus(d, m, t) : apply_r1_minus(d, m, t);
            break;
        case MoveKind::R2p:
        case MoveKind::R2pp:
        case MoveKind::V:
            need(m.sign == 1 || m.sign == -1, "R2 needs a sign");
            res = m.sign > 0 ? apply_r2_plus(d, m, t) : apply_r2_minus(d, m, t);
            break;
        case MoveKind::R3p:
        case MoveKind::R3pp:
            res = apply_r3(d, m, t);
            break;
        case MoveKind::R4:
            res = apply_r4(d, m, t);
            break;
    }
    res.diagram.validate();

    int dh = height(res.diagram) - height(d);
    switch (m.kind) {
        case MoveKind::R2p:
        case MoveKind::R3p:
        case MoveKind::R4:
            need(dh == 0, to_string(m.kind) + " must keep h constant");
            break;
        case MoveKind::R3pp:
            // Smoothing an oriented trigon re-pairs the three boundary
            // arcs, so when the stub edges wrap around and are shared
            // between the trigon's own strands the cycle structure (and h)
            // can change; only the recomputed delta is recorded.
            break;
        case MoveKind::V:
            need(dh == -m.sign, "V must change h by -sign");
            break;
        case MoveKind::MarkovR1:
            need(dh == 0, "Markov R1 must keep h constant");
            if (m.sign < 0) {
                // Valid exactly when the inverse creation would be.
                need(height(res.diagram) == 0,
                     "Markov R1 requires a braided diagram");
                SeifertStructure s = smooth(res.diagram);
                need(is_polar_face(s, s.regions.face_of(res.inverse.darts[0])),
                     "Markov R1 monogon must lie in a polar region");
            }
            break;
        default:
            break;
    }

    res.applied = m;
    res.applied.h_delta = dh;
    res.inverse.h_delta = -dh;
    return res;
}

std::vector<MoveRecord> applicable_moves(const Diagram& d, const Theory& t,
                                         const MoveBudget& budget) {
    std::vector<MoveRecord> out;
    FaceSet faces = trace_faces(d);
    std::set<DartRef> occupied;
    for (auto& p : d.placements) {
        occupied.insert(p.own);
        occupied.insert(p.container);
    }
    auto face_free = [&](const std::vector<DartRef>& walk) {
        for (auto& x : walk)
            if (occupied.count(x)) return false;
        return true;
    };

    std::optional<SeifertStructure> smoothed;
    auto cycles = [&]() -> SeifertStructure& {
        if (!smoothed) smoothed = smooth(d);
        return *smoothed;
    };

    for (auto& walk : faces.walks) {
        if (walk.size() == 1 && !walk[0].loop && face_free(walk)) {
            SignedTag tag = d.crossings.at(walk[0].owner).tag;
            if (t.r1_allowed(tag))
                out.push_back({MoveKind::R1, -1, {tag}, {walk[0]}, {}, 0});
        } else if (walk.size() == 2 && !walk[0].loop && !walk[1].loop &&
                   walk[0].owner != walk[1].owner && face_free(walk)) {
            SignedTag tx = d.crossings.at(walk[0].owner).tag;
            SignedTag ty = d.crossings.at(walk[1].owner).tag;
            if (t.canon(tx) == t.canon(bar(ty)) && t.r2_allowed(tx.letter)) {
                try {
                    MoveKind k = classify_r2_minus(d, walk[0], walk[1]);
                    out.push_back({k, -1, {tx, ty}, {walk[0]}, {}, 0});
                } catch (const MoveError&) {
                }
            }
            if (t.r4_allowed(tx, ty))
                out.push_back({MoveKind::R4, 0, {tx, ty}, {walk[0]}, {}, 0});
        } else if (walk.size() == 3 && face_free(walk)) {
            std::set<int> cids;
            bool loops = false;
            int outs = 0;
            for (auto& x : walk) {
                loops = loops || x.loop;
                if (!x.loop) {
                    cids.insert(x.owner);
                    outs += d.is_out(x) ? 1 : 0;
                }
            }
            if (loops || cids.size() != 3) continue;
            bool oriented = (outs == 0 || outs == 3);
            MoveRecord r{oriented ? MoveKind::R3pp : MoveKind::R3p, 0, {},
                         {walk[0]}, {}, 0};
            try {
                apply_r3(d, r, t);
                out.push_back(r);
            } catch (const MoveError&) {
            }
        }
    }

    if (!budget.creating) return out;
    int made = 0;
    auto push = [&](MoveRecord r) {
        if (made < budget.max_creating) {
            out.push_back(std::move(r));
            ++made;
        }
    };

    for (auto& [eid, e] : d.edges)
        for (DartRef side : {e.head, e.tail})
            for (SignedTag tag : t.signed_tags())
                if (t.r1_allowed(tag))
                    push({MoveKind::R1, +1, {tag}, {side}, {eid}, 0});

    // Pushes pair darts across the whole (placement-merged) face, so
    // nested components can be joined too.
    for (auto& group : faces.faces()) {
        std::vector<DartRef> ds;
        for (int w : group)
            for (auto& x : faces.walks[w]) ds.push_back(x);
        for (size_t i = 0; i < ds.size(); ++i)
            for (size_t j = i + 1; j < ds.size(); ++j) {
                int ea = d.edge_of(ds[i]), eb = d.edge_of(ds[j]);
                if (ea == eb) continue;
                MoveKind k;
                if (d.is_out(ds[i]) != d.is_out(ds[j]))
                    k = MoveKind::R2p;
                else if (cycles().cycle_of_edge.at(ea) !=
                         cycles().cycle_of_edge.at(eb))
                    k = MoveKind::V;
                else if (budget.r2_same_cycle)
                    k = MoveKind::R2pp;
                else
                    continue;
                for (SignedTag tag : t.signed_tags())
                    if (t.r2_allowed(tag.letter))
                        push({k, +1, {tag}, {ds[i], ds[j]}, {}, 0});
            }
    }
    return out;
}

std::vector<Diagram> replay_diagrams(const MoveSequence& seq, const Theory& t) {
    std::vector<Diagram> out;
    out.push_back(seq.initial);
    for (const auto& m : seq.moves)
        out.push_back(apply_move(out.back(), m, t).diagram);
    return out;
}

namespace {

// R2+ family kind for pushing the arc of `x` across the arc of `y`.
MoveKind creation_kind(const Diagram& d, DartRef x, DartRef y) {
    if (d.is_out(x) != d.is_out(y)) return MoveKind::R2p;
    SeifertStructure s = smooth(d);
    return s.cycle_of_edge.at(d.edge_of(x)) != s.cycle_of_edge.at(d.edge_of(y))
               ? MoveKind::V
               : MoveKind::R2pp;
}

std::set<int> crossing_ids(const Diagram& d) {
    std::set<int> out;
    for (auto& [id, c] : d.crossings) out.insert(id);
    return out;
}

std::set<int> new_ids(const std::set<int>& before, const std::set<int>& after) {
    std::set<int> out;
    for (int id : after)
        if (!before.count(id)) out.insert(id);
    return out;
}

}  // namespace

FingerResult finger_move(const Diagram& d, DartRef from,
                         const std::vector<DartRef>& across, FingerKind kind,
                         const Theory& t, std::optional<SignedTag> tag) {
    TheoryClassification cls = classify(t);
    need(cls.regular, "finger moves need a regular theory");
    SignedTag a{};
    if (tag) {
        a = *tag;
    } else {
        need(!cls.dominant.empty(), "finger move needs a tag or a dominant one");
        a = *cls.dominant.begin();
    }
    if (kind == FingerKind::B)
        need(cls.normal && cls.dominant.count(t.canon(a)),
             "B fingers need a normal theory and its dominant tag");
    need(!across.empty(), "finger move crosses at least one arc");

    FingerResult res;
    res.diagram = d;
    DartRef tip = from;
    std::set<int> prev_pair, last_pair;
    auto record = [&](const ApplyResult& ar) {
        res.records.push_back(ar.applied);
        res.retraction.insert(res.retraction.begin(), ar.inverse);
    };

    for (DartRef ad : across) {
        need(res.diagram.has_dart(ad), "finger track dart is stale");
        std::set<int> before = crossing_ids(res.diagram);
        int tip_edge = res.diagram.edge_of(tip);
        MoveKind k = creation_kind(res.diagram, tip, ad);
        ApplyResult ar =
            apply_move(res.diagram, {k, +1, {a}, {tip, ad}, {}, 0}, t);
        prev_pair = last_pair;
        last_pair = new_ids(before, crossing_ids(ar.diagram));
        record(ar);
        res.diagram = std::move(ar.diagram);

        // The new tip is the middle piece of the pushed strand: follow the
        // old tip edge through the new crossing and take the dart facing
        // away from the fresh bigon.
        const Edge& ef = res.diagram.edge(tip_edge);
        int mid;
        if (!ef.head.loop && last_pair.count(ef.head.owner)) {
            DartRef out{ef.head.owner, (ef.head.slot + 2) % 4};
            mid = res.diagram.edge_of(out);
        } else {
            need(!ef.tail.loop && last_pair.count(ef.tail.owner),
                 "cannot locate the finger tip");
            DartRef in{ef.tail.owner, (ef.tail.slot + 2) % 4};
            mid = res.diagram.edge_of(in);
        }
        auto bigon = orbit(res.diagram, res.retraction.front().darts[0]);
        auto in_bigon = [&](DartRef x) {
            return std::find(bigon.begin(), bigon.end(), x) != bigon.end();
        };
        const Edge& em = res.diagram.edge(mid);
        need(in_bigon(em.tail) != in_bigon(em.head), "cannot locate finger tip");
        tip = in_bigon(em.tail) ? em.head : em.tail;
    }

    if (kind == FingerKind::B) {
        need(across.size() >= 2, "B finger crosses both arms of a crossing");
        // The trigon to flip sits between the finger wall and the two arm
        // pieces: a three-sided face meeting both of the last crossing
        // pairs.
        FaceSet faces = trace_faces(res.diagram);
        std::optional<DartRef> locus;
        for (auto& walk : faces.walks) {
            if (walk.size() != 3) continue;
            bool hit_prev = false, hit_last = false, loops = false;
            for (auto& x : walk) {
                loops = loops || x.loop;
                if (x.loop) continue;
                hit_prev = hit_prev || prev_pair.count(x.owner);
                hit_last = hit_last || last_pair.count(x.owner);
            }
            if (loops || !hit_prev || !hit_last) continue;
            need(!locus, "ambiguous B finger trigon");
            locus = walk[0];
        }
        need(locus.has_value(), "B finger did not end at a crossing");
        auto orb = orbit(res.diagram, *locus);
        int outs = 0;
        for (auto& x : orb) outs += res.diagram.is_out(x) ? 1 : 0;
        MoveKind k3 = (outs == 0 || outs == 3) ? MoveKind::R3pp : MoveKind::R3p;
        ApplyResult ar = apply_move(res.diagram, {k3, 0, {}, {*locus}, {}, 0}, t);
        record(ar);
        res.diagram = std::move(ar.diagram);
    }
    return res;
}

MoveSequence detour(const Diagram& d, const std::vector<int>& p,
                    const std::vector<DartRef>& p_new_track, const Theory& t) {
    TheoryClassification cls = classify(t);
    need(cls.normal, "detours need a normal theory");
    need(!p.empty(), "detour needs a subpath");
    char dom = cls.dominant.begin()->letter;
    for (int eid : p) {
        auto it = d.edges.find(eid);
        need(it != d.edges.end(), "detour subpath edge does not exist");
        for (DartRef x : {it->second.tail, it->second.head})
            if (!x.loop)
                need(t.canon(d.crossings.at(x.owner).tag).letter == dom,
                     "subpath is not x above/below");
    }

    // Supported shape: each track dart identifies the region swept next,
    // which must be an empty bigon (an innermost arc, eliminated by R2-)
    // or a trigon (one crossing inside, passed by the R3 core of a
    // B finger whose extension/retraction halves cancel).
    MoveSequence seq{d, {}};
    Diagram cur = d;
    for (DartRef fd : p_new_track) {
        need(cur.has_dart(fd) && !fd.loop, "detour track dart is stale");
        auto orb = orbit(cur, fd);
        MoveRecord r;
        if (orb.size() == 2 && orb[0].owner != orb[1].owner) {
            r = {classify_r2_minus(cur, orb[0], orb[1]), -1, {}, {fd}, {}, 0};
        } else if (orb.size() == 3) {
            int outs = 0;
            for (auto& x : orb) outs += cur.is_out(x) ? 1 : 0;
            r = {(outs == 0 || outs == 3) ? MoveKind::R3pp : MoveKind::R3p,
                 0, {}, {fd}, {}, 0};
        } else {
            throw MoveError("detour: region ahead is not a bigon or trigon");
        }
        ApplyResult ar = apply_move(cur, r, t);
        seq.moves.push_back(ar.applied);
        cur = std::move(ar.diagram);
    }
    return seq;
}

namespace {

// Breadth-first path from face `from` to the nearest polar face; returns
// the darts of the crossed arcs, each facing the face it is crossed from.
std::vector<DartRef> arcs_to_pole(const Diagram& d, const SeifertStructure& s,
                                  int from) {
    std::map<int, std::pair<int, DartRef>> parent;  // face -> (prev, arc dart)
    std::vector<int> queue{from};
    parent[from] = {-1, {}};
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        int f = queue[qi];
        if (std::find(s.polar_regions.begin(), s.polar_regions.end(), f) !=
            s.polar_regions.end()) {
            std::vector<DartRef> arcs;
            for (int c = f; parent.at(c).first != -1; c = parent.at(c).first)
                arcs.push_back(parent.at(c).second);
            std::reverse(arcs.begin(), arcs.end());
            return arcs;
        }
        for (auto& x : s.regions.walks[f]) {
            DartRef other = d.alpha(x);
            int g = s.regions.face_of(other);
            if (!parent.count(g)) {
                parent[g] = {f, x};
                queue.push_back(g);
            }
        }
    }
    throw MoveError("no route to a polar region");
}

// Shape search for a positive R2'': kink one of the two arcs, kink the
// fresh loop with the opposite letter, push a loop strand across the other
// arc with V+ (the loop is its own Seifert circle), then cancel the kink
// pair with V-.  Loci are checked against the endpoint, so only the shape
// is pinned; `restricted` prunes the kinks to the move's own arcs first.
std::optional<MoveSequence> r2pp_shape_search(const Diagram& d,
                                              const MoveRecord& m,
                                              const Diagram& target,
                                              const Theory& t,
                                              bool restricted) {
    std::set<int> arcs{d.edge_of(m.darts[0]), d.edge_of(m.darts[1])};
    for (const auto& k1 : applicable_moves(d, t, {true, 2000, false})) {
        if (k1.kind != MoveKind::R1 || k1.sign != +1) continue;
        if (restricted && !arcs.count(k1.edges[0])) continue;
        Diagram d1 = apply_move(d, k1, t).diagram;
        for (const auto& k2 : applicable_moves(d1, t, {true, 2000, false})) {
            if (k2.kind != MoveKind::R1 || k2.sign != +1) continue;
            if (restricted && d.edges.count(k2.edges[0])) continue;
            Diagram d2 = apply_move(d1, k2, t).diagram;
            for (const auto& vp : applicable_moves(d2, t, {true, 2000, false})) {
                if (vp.kind != MoveKind::V || vp.sign != +1) continue;
                Diagram d3;
                try {
                    d3 = apply_move(d2, vp, t).diagram;
                } catch (const MoveError&) {
                    continue;
                }
                for (const auto& vm : applicable_moves(d3, t, {false, 0, true})) {
                    if (vm.kind != MoveKind::V || vm.sign != -1) continue;
                    try {
                        if (!is_isomorphic(apply_move(d3, vm, t).diagram,
                                           target))
                            continue;
                    } catch (const MoveError&) {
                        continue;
                    }
                    MoveSequence seq{d, {}};
                    Diagram cur = d;
                    for (const MoveRecord& r : {k1, k2, vp, vm}) {
                        ApplyResult ar = apply_move(cur, r, t);
                        seq.moves.push_back(ar.applied);
                        cur = std::move(ar.diagram);
                    }
                    return seq;
                }
            }
        }
    }
    return std::nullopt;
}

MoveSequence decompose_r2pp(const Diagram& d, const MoveRecord& m,
                            const Theory& t) {
    Diagram target = apply_move(d, m, t).diagram;
    if (auto seq = r2pp_shape_search(d, m, target, t, true)) return *seq;
    if (auto seq = r2pp_shape_search(d, m, target, t, false)) return *seq;
    throw MoveError("no R2'' decomposition found at this locus");
}

bool finish_search(const Diagram& cur, const Diagram& target, const Theory& t,
                   int depth, std::set<std::string>& seen,
                   std::vector<MoveRecord>& out) {
    if (is_isomorphic(cur, target)) return true;
    if (depth == 0) return false;
    for (const auto& m : applicable_moves(cur, t, {false, 0, true})) {
        if (m.kind == MoveKind::R1 || m.kind == MoveKind::MarkovR1 ||
            m.kind == MoveKind::R4)
            continue;  // never delete or flip the transported kink
        Diagram next;
        MoveRecord rec;
        try {
            ApplyResult ar = apply_move(cur, m, t);
            rec = ar.applied;
            next = std::move(ar.diagram);
        } catch (const MoveError&) {
            continue;
        }
        if (!seen.insert(canonical_code(next)).second) continue;
        out.push_back(rec);
        if (finish_search(next, target, t, depth - 1, seen, out)) return true;
        out.pop_back();
    }
    return false;
}

MoveSequence decompose_r1(const Diagram& d, const MoveRecord& m,
                          const Theory& t) {
    TheoryClassification cls = classify(t);
    need(cls.normal, "the R1 decomposition needs a normal theory");
    need(height(d) == 0, "the R1 decomposition needs a braided diagram");
    Diagram target = apply_move(d, m, t).diagram;

    SeifertStructure s = smooth(d);
    DartRef side = m.darts[0];
    int f0 = s.regions.face_of(side);
    need(std::find(s.polar_regions.begin(), s.polar_regions.end(), f0) ==
             s.polar_regions.end(),
         "monogon already lies in a polar region: the move is a Markov R1");

    // Push a finger from the kink site into the nearest polar region,
    // birth the kink there as a Markov move, then transport it back and
    // retract; the tail of the sequence is found against the endpoint.
    std::vector<DartRef> arcs = arcs_to_pole(d, s, f0);
    for (SignedTag push_tag : cls.dominant) {
        FingerResult fr;
        try {
            fr = finger_move(d, side, arcs, FingerKind::A, t, push_tag);
        } catch (const MoveError&) {
            continue;
        }
        // The tip dart faces the polar region: it is the dart of the last
        // push's strand middle facing away from its bigon, recoverable as
        // the creating locus of the retraction's innermost record.
        DartRef tip = fr.retraction.front().darts[0];
        auto borb = orbit(fr.diagram, tip);
        for (auto& bd : borb)
            for (DartRef cand : {fr.diagram.edge(fr.diagram.edge_of(bd)).tail,
                                 fr.diagram.edge(fr.diagram.edge_of(bd)).head}) {
                Diagram dm;
                MoveRecord mrec;
                try {
                    MoveRecord mk{MoveKind::MarkovR1, +1, m.tags, {cand},
                                  {fr.diagram.edge_of(cand)}, 0};
                    ApplyResult ar = apply_move(fr.diagram, mk, t);
                    mrec = ar.applied;
                    dm = std::move(ar.diagram);
                } catch (const MoveError&) {
                    continue;
                }
                std::vector<MoveRecord> tail;
                std::set<std::string> seen{canonical_code(dm)};
                if (!finish_search(dm, target, t, (int)arcs.size() * 3 + 2,
                                   seen, tail))
                    continue;
                MoveSequence seq{d, fr.records};
                seq.moves.push_back(mrec);
                for (auto& r : tail) seq.moves.push_back(r);
                return seq;
            }
    }
    throw MoveError("no R1 decomposition found at this locus");
}

}  // namespace

MoveSequence decompose(const Diagram& d, const MoveRecord& m, const Theory& t) {
    need(m.sign == +1, "only creating moves decompose");
    if (m.kind == MoveKind::R2pp) return decompose_r2pp(d, m, t);
    if (m.kind == MoveKind::R1) return decompose_r1(d, m, t);
    throw MoveError("move kind is not decomposable (positive R2'' or R1)");
}

}  // namespace gkd
