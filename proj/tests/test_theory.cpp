#include "doctest.h"
#include "gkd/theory.hpp"

using namespace gkd;

namespace {
std::set<SignedTag> tags(std::initializer_list<const char*> names) {
    std::set<SignedTag> out;
    for (auto n : names) out.insert(parse_signed_tag(n));
    return out;
}
}  // namespace

TEST_CASE("preset classification golden table") {
    struct Row {
        const char* name;
        bool regular, normal;
        std::set<SignedTag> dominant;
    };
    const Row table[] = {
        {"classical", true, true, tags({"r", "~r"})},
        {"virtual", true, true, tags({"v"})},
        {"welded", true, true, tags({"w"})},
        {"doodle", true, false, {}},
        {"virtual_doodle", true, true, tags({"v"})},
        {"free", true, true, tags({"v"})},
        {"singular", true, true, tags({"r", "~r"})},
    };
    for (auto& row : table) {
        CAPTURE(row.name);
        auto c = classify(preset(row.name));
        CHECK(c.regular == row.regular);
        CHECK(c.normal == row.normal);
        CHECK(c.dominant == row.dominant);
    }
}

TEST_CASE("classical tables") {
    auto t = preset("classical");
    for (auto x : t.signed_tags()) CHECK(t.r1_allowed(x));
    CHECK(t.r2_allowed('r'));
    CHECK(t.r3_allowed({'r', true}, {'r', false}, {'r', true}));
    CHECK(t.r3_allowed({'r', false}, {'r', true}, {'r', false}));
    CHECK_FALSE(t.r3_allowed({'r', true}, {'r', true}, {'r', true}));
    CHECK_FALSE(t.r4_allowed({'r', true}, {'r', false}));
}

TEST_CASE("welded forbidden moves") {
    auto t = preset("welded");
    CHECK(t.r3_allowed({'r', false}, {'w', true}, {'r', true}));
    CHECK_FALSE(t.r3_allowed({'r', true}, {'w', true}, {'r', false}));
    CHECK(t.canon({'w', false}) == SignedTag{'w', true});
}

TEST_CASE("virtual dominance") {
    auto t = preset("virtual");
    for (auto a : t.signed_tags()) {
        CHECK(dominates(t, {'v', true}, a));
        CHECK(dominates(t, {'v', false}, a));  // v is involutive
    }
    CHECK_FALSE(dominates(t, {'r', true}, {'v', true}));
}

TEST_CASE("doodle has no R3") {
    auto t = preset("doodle");
    CHECK(t.r3.empty());
    CHECK_FALSE(t.r3_allowed({'d', true}, {'d', true}, {'d', true}));
}

TEST_CASE("free theory") {
    auto t = preset("free");
    CHECK(dominates(t, {'F', true}, {'F', true}));
    CHECK_FALSE(dominates(t, {'F', true}, {'v', true}));
    CHECK(t.r4_allowed({'F', true}, {'v', true}));
    CHECK(t.r4_allowed({'v', false}, {'F', false}));  // both involutive
}

TEST_CASE("singular crossings have no R1") {
    auto t = preset("singular");
    CHECK_FALSE(t.r1_allowed({'s', true}));
    CHECK_FALSE(t.r1_allowed({'s', false}));
    CHECK(t.r1_allowed({'r', true}));
    CHECK(t.r2_allowed('s'));
    CHECK(t.r4_allowed({'r', true}, {'s', true}));
    CHECK(dominates(t, {'r', true}, {'s', false}));
    CHECK_FALSE(dominates(t, {'s', true}, {'r', true}));
}

TEST_CASE("bar is an involution on every preset") {
    for (auto name : {"classical", "virtual", "welded", "doodle",
                      "virtual_doodle", "free", "singular"}) {
        auto t = preset(name);
        for (auto x : t.signed_tags()) {
            CHECK(bar(bar(x)) == x);
            CHECK(t.canon(bar(t.canon(bar(x)))) == t.canon(x));
        }
    }
}

TEST_CASE("theory file round trip") {
    for (auto name : {"classical", "virtual", "welded", "doodle",
                      "virtual_doodle", "free", "singular"}) {
        CAPTURE(name);
        auto t = preset(name);
        auto u = parse_theory(emit_theory(t));
        CHECK(u.name == t.name);
        CHECK(u.tags == t.tags);
        CHECK(u.involutive == t.involutive);
        CHECK(u.r1 == t.r1);
        CHECK(u.r2 == t.r2);
        CHECK(u.r3 == t.r3);
        CHECK(u.r4 == t.r4);
        CHECK(u.braiding_tag == t.braiding_tag);
        CHECK(emit_theory(u) == emit_theory(t));
    }
}

TEST_CASE("theory parser diagnostics") {
    CHECK_THROWS(parse_theory("tag r\n"));                    // no name
    CHECK_THROWS(parse_theory("theory x\ntag rr\n"));         // bad tag
    CHECK_THROWS(parse_theory("theory x\ntag r\nr1 q\n"));    // foreign tag
    CHECK_THROWS(parse_theory("theory x\ntag r\nbogus 1\n"));
    auto t = parse_theory("theory x # a comment\ntag r\nr2 r\nbraiding r\n");
    CHECK(t.name == "x");
    CHECK(t.r2_allowed('r'));
}

TEST_CASE("unknown preset rejected") {
    CHECK_THROWS(preset("euclidean"));
}
