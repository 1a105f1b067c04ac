#include "doctest.h"
#include "fixtures.hpp"
#include "gkd/diagram.hpp"

using namespace gkd;

TEST_CASE("dart text round trip") {
    for (auto s : {"c0.0", "c12.3", "o4.t", "o0.h"}) {
        CHECK(to_string(parse_dart(s)) == s);
    }
    CHECK_THROWS(parse_dart("x1.0"));
    CHECK_THROWS(parse_dart("c1.4"));
    CHECK_THROWS(parse_dart("o1.2"));
}

TEST_CASE("free loop") {
    auto d = fixtures::free_loop();
    d.validate();
    CHECK(d.loops.size() == 1);
    CHECK(d.edges.size() == 1);
    auto f = trace_faces(d);
    CHECK(f.face_count == 2);
    CHECK(f.walks.size() == 2);
    const Edge& e = d.edges.begin()->second;
    CHECK(left_face(d, f, e.id) != right_face(d, f, e.id));
}

TEST_CASE("two nested loops") {
    auto d = fixtures::two_nested_loops();
    d.validate();
    CHECK(d.placements.size() == 1);
    auto f = trace_faces(d);
    CHECK(f.walks.size() == 4);
    CHECK(f.face_count == 3);
}

TEST_CASE("kinked unknot faces") {
    auto d = fixtures::kinked_unknot();
    d.validate();
    CHECK(d.crossings.size() == 1);
    CHECK(d.edges.size() == 2);
    auto f = trace_faces(d);
    CHECK(f.face_count == 3);
    // Monogon and outer face are singleton orbits; the middle face sees
    // both edges.
    int monogons = 0;
    for (auto& w : f.walks) monogons += (w.size() == 1);
    CHECK(monogons == 2);
    // The kink's monogon is the orbit of the incoming monogon-edge dart.
    CHECK(f.walks[f.walk_of.at(DartRef{0, 2})].size() == 1);
}

TEST_CASE("trefoil counts") {
    auto d = fixtures::trefoil();
    d.validate();
    CHECK(d.crossings.size() == 3);
    CHECK(d.edges.size() == 6);
    auto f = trace_faces(d);
    CHECK(f.face_count == 5);
    CHECK(d.component_keys().size() == 1);
}

TEST_CASE("worked example is planar with six faces") {
    auto d = fixtures::worked_example();
    d.validate();
    CHECK(d.crossings.size() == 4);
    CHECK(d.edges.size() == 8);
    auto f = trace_faces(d);
    CHECK(f.face_count == 6);
    CHECK(d.component_keys().size() == 1);
}

TEST_CASE("strand navigation") {
    auto d = fixtures::trefoil();
    for (auto& [id, c] : d.crossings) {
        DartRef upper_in{id, 1}, lower_in{id, 2};
        CHECK(d.through(upper_in) == DartRef{id, 3});
        CHECK(d.through(lower_in) == DartRef{id, 0});
        // Smoothing keeps braid strands horizontal.
        CHECK(d.smooth_through(upper_in) == DartRef{id, 0});
        CHECK(d.smooth_through(lower_in) == DartRef{id, 3});
    }
}

TEST_CASE("alpha and sigma") {
    auto d = fixtures::kinked_unknot();
    // Monogon edge: tail at slot 1, head at slot 2.
    CHECK(d.alpha(DartRef{0, 1}) == DartRef{0, 2});
    CHECK(d.alpha(DartRef{0, 2}) == DartRef{0, 1});
    CHECK(d.sigma(DartRef{0, 3}) == DartRef{0, 0});
    CHECK(d.is_out(DartRef{0, 0}));
    CHECK_FALSE(d.is_out(DartRef{0, 2}));
    // phi orbit of the incoming monogon dart is the monogon itself.
    CHECK(d.phi(DartRef{0, 2}) == DartRef{0, 2});
}

TEST_CASE("validate rejects non-transversal crossings") {
    // Incoming darts at opposite slots 0 and 2.
    std::vector<CrossingRecord> cs = {
        {0, {'r', true}, {{{0, true}, {0, false}, {1, true}, {1, false}}}}};
    CHECK_THROWS_AS(build_diagram(cs, {}), DiagramError);
}

TEST_CASE("validate rejects dangling edges") {
    Diagram d;
    int c = d.add_crossing({'r', true});
    d.add_edge({c, 0}, {c, 2});
    CHECK_THROWS_AS(d.validate(), DiagramError);
}

TEST_CASE("validate rejects a nonplanar rotation system") {
    // Trefoil pattern with one crossing's neighbours transposed: swapping
    // the two outputs of crossing 0 breaks transversality or Euler.
    std::vector<CrossingRecord> cs;
    SignedTag tag{'r', true};
    for (int j = 0; j < 3; ++j) {
        int up_out = 2 * j, lo_out = 2 * j + 1;
        int up_in = 2 * ((j + 2) % 3), lo_in = 2 * ((j + 2) % 3) + 1;
        if (j == 0) std::swap(up_in, lo_in);  // cross the returning strands
        cs.push_back({j, tag,
                      {{{up_out, false}, {up_in, true}, {lo_in, true}, {lo_out, false}}}});
    }
    CHECK_THROWS_AS(build_diagram(cs, {}), DiagramError);
}

TEST_CASE("placements must form a forest") {
    // Two loops, no placement: component count mismatch.
    CHECK_THROWS_AS(build_diagram({}, {{0, {}, true}, {1, {}, false}}),
                    DiagramError);
    // Self-placement is rejected.
    CHECK_THROWS_AS(build_diagram({}, {{0, DartRef{0, 1, true}, true}}),
                    DiagramError);
}

TEST_CASE("mixed diagram: kink with a loop in its monogon") {
    CrossingRecord c{0, {'r', true}, {{{0, false}, {1, false}, {1, true}, {0, true}}}};
    LoopRecord lr{0, DartRef{0, 2}, true};  // inside the monogon face
    auto d = build_diagram({c}, {lr});
    d.validate();
    auto f = trace_faces(d);
    CHECK(f.face_count == 4);  // 3 + 2 - 1 merged
    CHECK(d.component_keys().size() == 2);
    CHECK(d.placements.size() == 1);
}
