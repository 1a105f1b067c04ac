#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "gkd/canonical.hpp"
#include "gkd/moves.hpp"
#include "gkd/seifert.hpp"

using namespace gkd;

namespace {

const SignedTag R{'r', true}, Rb{'r', false};

Diagram side_by_side_loops() {
    // Both loops show their head side to the shared face: incoherent pair.
    return build_diagram({}, {{0, {}, true}, {1, DartRef{0, 1, true}, true}});
}

}  // namespace

TEST_CASE("move kind names round trip") {
    for (MoveKind k : {MoveKind::R1, MoveKind::R2p, MoveKind::R2pp, MoveKind::V,
                       MoveKind::R3p, MoveKind::R3pp, MoveKind::R4,
                       MoveKind::MarkovR1})
        CHECK(parse_move_kind(to_string(k)) == k);
    CHECK_THROWS_AS(parse_move_kind("R9"), MoveError);
}

TEST_CASE("R1+ on a free loop builds the kinked unknot") {
    Theory t = preset("classical");
    Diagram d = fixtures::free_loop();
    int eid = d.edges.begin()->first;
    const Edge& e = d.edge(eid);

    MoveRecord left{MoveKind::R1, +1, {R}, {e.head}, {eid}, 0};
    ApplyResult res = apply_move(d, left, t);
    CHECK(res.applied.h_delta == 0);
    CHECK(is_isomorphic(res.diagram, fixtures::kinked_unknot(R)));

    // The inverse removes the kink again.
    ApplyResult back = apply_move(res.diagram, res.inverse, t);
    CHECK(is_isomorphic(back.diagram, d));

    // A right kink is isomorphic on the sphere but wired mirrorwise.
    MoveRecord right{MoveKind::R1, +1, {R}, {e.tail}, {eid}, 0};
    ApplyResult res2 = apply_move(d, right, t);
    CHECK(is_isomorphic(res2.diagram, fixtures::kinked_unknot(R)));
    CHECK(is_isomorphic(apply_move(res2.diagram, res2.inverse, t).diagram, d));
}

TEST_CASE("R1 kink side is preserved through delete and recreate") {
    Theory t = preset("classical");
    // Marker loop in the monogon would block; put it in the outer face
    // instead and check the side survives a full round trip.
    for (bool left : {true, false}) {
        Diagram d = fixtures::free_loop();
        int eid = d.edges.begin()->first;
        DartRef side = left ? d.edge(eid).head : d.edge(eid).tail;
        Diagram kinked =
            apply_move(d, {MoveKind::R1, +1, {R}, {side}, {eid}, 0}, t).diagram;
        // Drop a marker into the kink-side face to pin the chirality.
        Diagram marked = kinked;
        int L = marked.add_loop();
        marked.add_edge({L, 0, true}, {L, 1, true});
        DartRef host = left ? marked.edge(eid).head : marked.edge(eid).tail;
        marked.placements.push_back({{L, 0, true}, host});
        marked.touch();
        marked.validate();

        // Find the monogon and remove the kink; the marker must end up in
        // the face of the matching side of the surviving loop edge.
        DartRef monogon;
        for (DartRef x : marked.all_darts())
            if (!x.loop && marked.phi(x) == x) monogon = x;
        ApplyResult res =
            apply_move(marked, {MoveKind::R1, -1, {}, {monogon}, {}, 0}, t);
        ApplyResult again = apply_move(res.diagram, res.inverse, t);
        CHECK(is_isomorphic(again.diagram, marked));
    }
}

TEST_CASE("R1- on the kinked unknot yields the free loop") {
    Theory t = preset("classical");
    Diagram d = fixtures::kinked_unknot(R);
    MoveRecord del{MoveKind::R1, -1, {R}, {DartRef{0, 2}}, {}, 0};
    ApplyResult res = apply_move(d, del, t);
    CHECK(is_isomorphic(res.diagram, fixtures::free_loop()));
    CHECK(is_isomorphic(apply_move(res.diagram, res.inverse, t).diagram, d));
}

TEST_CASE("R1 respects the theory table") {
    Theory t = preset("singular");
    Diagram d = fixtures::free_loop();
    int eid = d.edges.begin()->first;
    MoveRecord m{MoveKind::R1, +1, {SignedTag{'s', true}}, {d.edge(eid).head},
                 {eid}, 0};
    CHECK_THROWS_AS(apply_move(d, m, t), MoveError);
    m.tags = {R};
    CHECK_NOTHROW(apply_move(d, m, t));
}

TEST_CASE("V+ joins two incoherent loops and drops h by one") {
    Theory t = preset("classical");
    Diagram d = side_by_side_loops();
    CHECK(height(d) == 1);
    MoveRecord v{MoveKind::V, +1, {R}, {{0, 1, true}, {1, 1, true}}, {}, 0};
    ApplyResult res = apply_move(d, v, t);
    CHECK(res.applied.h_delta == -1);
    CHECK(height(res.diagram) == 0);
    CHECK(res.diagram.crossings.size() == 2);
    CHECK(res.diagram.loops.empty());
    CHECK(res.diagram.placements.empty());

    // The inverse V- disconnects again and restores the placement.
    ApplyResult back = apply_move(res.diagram, res.inverse, t);
    CHECK(back.applied.h_delta == +1);
    CHECK(is_isomorphic(back.diagram, d));

    // Kind checking: the same locus is not an R2''.
    MoveRecord wrong = v;
    wrong.kind = MoveKind::R2pp;
    CHECK_THROWS_AS(apply_move(d, wrong, t), MoveError);
}

TEST_CASE("R2'+ joins two coherent nested loops, h stays zero") {
    Theory t = preset("classical");
    Diagram d = fixtures::two_nested_loops();
    CHECK(height(d) == 0);
    MoveRecord m{MoveKind::R2p, +1, {R}, {{0, 1, true}, {1, 0, true}}, {}, 0};
    ApplyResult res = apply_move(d, m, t);
    CHECK(res.applied.h_delta == 0);
    CHECK(res.diagram.crossings.size() == 2);
    CHECK(is_isomorphic(apply_move(res.diagram, res.inverse, t).diagram, d));

    MoveRecord wrong = m;
    wrong.kind = MoveKind::V;
    CHECK_THROWS_AS(apply_move(d, wrong, t), MoveError);
}

TEST_CASE("R2- cancels a conjugate bigon down to the kinked unknot") {
    Theory t = preset("classical");
    // Closure of s1(r) s1(~r) s1(r): the (r, ~r) pair cancels by R2''-.
    Diagram d = fixtures::braid_closure(2, {{1, R}, {1, Rb}, {1, R}});
    auto moves = applicable_moves(d, t, {false, 0, true});
    bool cancelled = false;
    for (const auto& m : moves) {
        if (m.sign != -1 || (m.kind != MoveKind::R2p && m.kind != MoveKind::R2pp &&
                             m.kind != MoveKind::V))
            continue;
        ApplyResult res = apply_move(d, m, t);
        if (is_isomorphic(res.diagram, fixtures::kinked_unknot(R)) ||
            is_isomorphic(res.diagram, fixtures::kinked_unknot(Rb)))
            cancelled = true;
        CHECK(is_isomorphic(apply_move(res.diagram, res.inverse, t).diagram, d));
    }
    CHECK(cancelled);
}

TEST_CASE("R3' realizes the gated braid relation") {
    Theory t = preset("classical");
    // s2(a) s1(c) s2(b) = s1(b) s2(c) s1(a) whenever (a, b) = (x, ~x).
    Diagram lhs = fixtures::braid_closure(3, {{2, R}, {1, R}, {2, Rb}});
    Diagram rhs = fixtures::braid_closure(3, {{1, Rb}, {2, R}, {1, R}});
    CHECK_FALSE(is_isomorphic(lhs, rhs));
    auto moves = applicable_moves(lhs, t, {false, 0, true});
    bool related = false;
    for (const auto& m : moves) {
        if (m.kind != MoveKind::R3p && m.kind != MoveKind::R3pp) continue;
        ApplyResult res = apply_move(lhs, m, t);
        if (m.kind == MoveKind::R3p) CHECK(res.applied.h_delta == 0);
        if (is_isomorphic(res.diagram, rhs)) related = true;
        CHECK(is_isomorphic(apply_move(res.diagram, res.inverse, t).diagram, lhs));
    }
    CHECK(related);
}

TEST_CASE("R3 with a same-sign mover is forbidden in the classical theory") {
    Theory t = preset("classical");
    Diagram d = fixtures::braid_closure(3, {{2, R}, {1, R}, {2, R}});
    for (const auto& m : applicable_moves(d, t, {false, 0, true}))
        CHECK(m.kind != MoveKind::R3p);
    // The virtual theory lets v-movers through instead.
    Theory v = preset("virtual");
    SignedTag V_{'v', true};
    Diagram dv = fixtures::braid_closure(3, {{2, V_}, {1, R}, {2, V_}});
    bool found = false;
    for (const auto& m : applicable_moves(dv, v, {false, 0, true}))
        found = found || m.kind == MoveKind::R3p;
    CHECK(found);
}

TEST_CASE("R4 swaps tags across a bigon and nothing else") {
    Theory t = preset("singular");
    SignedTag S{'s', true};
    Diagram d = fixtures::braid_closure(2, {{1, R}, {1, S}});
    auto moves = applicable_moves(d, t, {false, 0, true});
    bool swapped = false;
    for (const auto& m : moves) {
        if (m.kind != MoveKind::R4) continue;
        ApplyResult res = apply_move(d, m, t);
        CHECK(res.applied.h_delta == 0);
        // Same underlying map: only the tag assignment moved.
        Diagram manual = d;
        std::swap(manual.crossings.at(0).tag, manual.crossings.at(1).tag);
        manual.touch();
        CHECK(canonical_code(res.diagram) == canonical_code(manual));
        CHECK(is_isomorphic(apply_move(res.diagram, res.inverse, t).diagram, d));
        swapped = true;
    }
    CHECK(swapped);
    // Classical r pairs do not R4.
    Theory c = preset("classical");
    Diagram d2 = fixtures::braid_closure(2, {{1, R}, {1, Rb}});
    for (const auto& m : applicable_moves(d2, c, {false, 0, true}))
        CHECK(m.kind != MoveKind::R4);
}

TEST_CASE("Markov R1 needs a braided diagram and a polar region") {
    Theory t = preset("classical");
    Diagram d = fixtures::trefoil(R);
    SeifertStructure s = smooth(d);
    REQUIRE(height(d) == 0);
    int polar_ok = 0, polar_rejected = 0;
    for (auto& [eid, e] : d.edges)
        for (DartRef side : {e.head, e.tail}) {
            MoveRecord m{MoveKind::MarkovR1, +1, {R}, {side}, {eid}, 0};
            try {
                ApplyResult res = apply_move(d, m, t);
                CHECK(res.applied.h_delta == 0);
                CHECK(height(res.diagram) == 0);
                // And the inverse is a Markov R1 again.
                CHECK(is_isomorphic(apply_move(res.diagram, res.inverse, t).diagram,
                                    d));
                ++polar_ok;
            } catch (const MoveError&) {
                ++polar_rejected;
            }
        }
    CHECK(polar_ok > 0);
    CHECK(polar_rejected > 0);

    // Not braided: h(worked example) = 2.
    Diagram w = fixtures::worked_example(R);
    int weid = w.edges.begin()->first;
    MoveRecord m{MoveKind::MarkovR1, +1, {R}, {w.edge(weid).head}, {weid}, 0};
    CHECK_THROWS_AS(apply_move(w, m, t), MoveError);
}

TEST_CASE("spec examples for applicable_moves") {
    Theory t = preset("classical");

    auto kinds = [&](const Diagram& d, int sign) {
        std::set<std::string> out;
        for (const auto& m : applicable_moves(d, t))
            if (m.sign == sign) out.insert(to_string(m.kind));
        return out;
    };

    Diagram loop = fixtures::free_loop();
    CHECK(kinds(loop, -1).empty());
    int r1_tags = 0;
    for (const auto& m : applicable_moves(loop, t))
        if (m.kind == MoveKind::R1 && m.sign == +1) ++r1_tags;
    CHECK(r1_tags == 4);  // two sides x {r, ~r}

    CHECK(kinds(fixtures::kinked_unknot(R), -1).count("R1"));

    Diagram bigon = fixtures::braid_closure(2, {{1, R}, {1, Rb}});
    auto del = kinds(bigon, -1);
    CHECK((del.count("R2'") || del.count("R2''") || del.count("V")));
}

TEST_CASE("every enumerated move applies and inverts") {
    Theory t = preset("classical");
    std::vector<Diagram> pool = {
        fixtures::free_loop(),
        fixtures::two_nested_loops(),
        side_by_side_loops(),
        fixtures::kinked_unknot(R),
        fixtures::trefoil(R),
        fixtures::worked_example(R),
        fixtures::braid_closure(2, {{1, R}, {1, Rb}, {1, R}}),
        fixtures::braid_closure(3, {{2, R}, {1, R}, {2, Rb}}),
    };
    int applied = 0;
    for (const Diagram& d : pool) {
        int h0 = height(d);
        for (const auto& m : applicable_moves(d, t, {true, 60, true})) {
            ApplyResult res = apply_move(d, m, t);
            CHECK(res.applied.h_delta == height(res.diagram) - h0);
            ApplyResult back = apply_move(res.diagram, res.inverse, t);
            CHECK(is_isomorphic(back.diagram, d));
            ++applied;
        }
    }
    CHECK(applied > 100);
}

TEST_CASE("replay_diagrams replays a short sequence") {
    Theory t = preset("classical");
    Diagram d = fixtures::free_loop();
    int eid = d.edges.begin()->first;
    MoveRecord k{MoveKind::R1, +1, {R}, {d.edge(eid).head}, {eid}, 0};
    ApplyResult first = apply_move(d, k, t);
    MoveSequence seq{d, {k, first.inverse}};
    auto frames = replay_diagrams(seq, t);
    REQUIRE(frames.size() == 3);
    CHECK(is_isomorphic(frames[0], frames[2]));
    CHECK(is_isomorphic(frames[1], fixtures::kinked_unknot(R)));
}

TEST_CASE("stale or malformed loci are rejected") {
    Theory t = preset("classical");
    Diagram d = fixtures::trefoil(R);
    // Not a monogon.
    CHECK_THROWS_AS(apply_move(d, {MoveKind::R1, -1, {}, {DartRef{0, 0}}, {}, 0}, t),
                    MoveError);
    // Missing edge.
    CHECK_THROWS_AS(
        apply_move(d, {MoveKind::R1, +1, {R}, {DartRef{0, 0}}, {99}, 0}, t),
        MoveError);
    // R2+ darts on different faces.
    FaceSet f = trace_faces(d);
    DartRef a{0, 0}, b;
    for (DartRef x : d.all_darts())
        if (f.face_of(x) != f.face_of(a)) b = x;
    CHECK_THROWS_AS(apply_move(d, {MoveKind::R2pp, +1, {R}, {a, b}, {}, 0}, t),
                    MoveError);
}
