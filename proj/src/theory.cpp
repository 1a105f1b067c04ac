#include "gkd/theory.hpp"

#include <algorithm>
#include <sstream>

namespace gkd {

static std::pair<SignedTag, SignedTag> ordered(SignedTag a, SignedTag b) {
    if (b < a) std::swap(a, b);
    return {a, b};
}

bool Theory::r4_allowed(SignedTag a, SignedTag b) const {
    return r4.count(ordered(canon(a), canon(b))) != 0;
}

void Theory::add_r4(SignedTag a, SignedTag b) {
    r4.insert(ordered(canon(a), canon(b)));
}

std::vector<SignedTag> Theory::signed_tags() const {
    std::vector<SignedTag> out;
    for (char c : tags) {
        out.push_back({c, true});
        if (!involutive.count(c)) out.push_back({c, false});
    }
    return out;
}

void Theory::validate() const {
    auto check_letter = [&](char c, const char* where) {
        if (!has_tag(c))
            throw std::runtime_error(std::string("theory '") + name + "': tag '" + c +
                                     "' in " + where + " table is not in the alphabet");
    };
    for (auto t : r1) check_letter(t.letter, "r1");
    for (char c : r2) check_letter(c, "r2");
    for (auto& tr : r3)
        for (auto t : tr) check_letter(t.letter, "r3");
    for (auto& pr : r4) {
        check_letter(pr.first.letter, "r4");
        check_letter(pr.second.letter, "r4");
    }
    check_letter(braiding_tag, "braiding");
    if (!r2_allowed(braiding_tag))
        throw std::runtime_error("theory '" + name + "': braiding tag lacks r2");
}

bool dominates(const Theory& t, SignedTag x, SignedTag a) {
    return t.r3_allowed(x, bar(x), a) && t.r3_allowed(bar(x), x, a);
}

TheoryClassification classify(const Theory& t) {
    TheoryClassification c;
    c.regular = std::all_of(t.tags.begin(), t.tags.end(),
                            [&](char l) { return t.r2_allowed(l); });
    auto all = t.signed_tags();
    for (auto x : all) {
        bool dom = std::all_of(all.begin(), all.end(),
                               [&](SignedTag a) { return dominates(t, x, a); });
        if (dom) c.dominant.insert(x);
    }
    c.normal = c.regular && !c.dominant.empty();
    return c;
}

namespace {

Theory make_classical() {
    Theory t;
    t.name = "classical";
    t.tags = {'r'};
    t.r1 = {{'r', true}, {'r', false}};
    t.r2 = {'r'};
    for (bool s1 : {true, false})
        for (bool s2 : {true, false})
            t.add_r3({'r', s1}, {'r', !s1}, {'r', s2});
    t.braiding_tag = 'r';
    return t;
}

// Gives x the full dominance set: R3'(x, ~x, a) and R3'(~x, x, a) for all a.
void make_dominant(Theory& t, char x) {
    for (auto a : t.signed_tags()) {
        t.add_r3({x, true}, {x, false}, a);
        t.add_r3({x, false}, {x, true}, a);
    }
}

Theory make_virtual() {
    Theory t = make_classical();
    t.name = "virtual";
    t.tags.insert('v');
    t.involutive.insert('v');
    t.r1.insert({'v', true});
    t.r2.insert('v');
    make_dominant(t, 'v');
    t.braiding_tag = 'v';
    return t;
}

Theory make_welded() {
    Theory t = make_classical();
    t.name = "welded";
    t.tags.insert('w');
    t.involutive.insert('w');
    t.r1.insert({'w', true});
    t.r2.insert('w');
    make_dominant(t, 'w');
    // The first forbidden move holds for welded crossings, the second does not.
    t.add_r3({'r', false}, {'w', true}, {'r', true});
    t.braiding_tag = 'w';
    return t;
}

Theory make_doodle() {
    Theory t;
    t.name = "doodle";
    t.tags = {'d'};
    t.involutive = {'d'};
    t.r1 = {{'d', true}};
    t.r2 = {'d'};
    t.braiding_tag = 'd';
    return t;
}

Theory make_virtual_doodle() {
    Theory t = make_doodle();
    t.name = "virtual_doodle";
    t.tags.insert('v');
    t.involutive.insert('v');
    t.r1.insert({'v', true});
    t.r2.insert('v');
    make_dominant(t, 'v');
    t.braiding_tag = 'v';
    return t;
}

Theory make_free() {
    Theory t;
    t.name = "free";
    t.tags = {'F', 'v'};
    t.involutive = {'F', 'v'};
    t.r1 = {{'F', true}, {'v', true}};
    t.r2 = {'F', 'v'};
    t.add_r3({'F', true}, {'F', true}, {'F', true});  // F dominates itself only
    make_dominant(t, 'v');
    t.add_r4({'F', true}, {'v', true});
    t.braiding_tag = 'v';
    return t;
}

Theory make_singular() {
    Theory t = make_classical();
    t.name = "singular";
    t.tags.insert('s');
    t.r2.insert('s');  // no R1 for singular crossings
    for (bool s1 : {true, false}) {
        for (auto a : t.signed_tags()) {
            t.add_r3({'r', s1}, {'r', !s1}, a);  // s is dominated by all
        }
        for (bool s2 : {true, false}) t.add_r4({'r', s1}, {'s', s2});
    }
    t.braiding_tag = 'r';
    return t;
}

}  // namespace

Theory preset(const std::string& name) {
    Theory t;
    if (name == "classical") t = make_classical();
    else if (name == "virtual") t = make_virtual();
    else if (name == "welded") t = make_welded();
    else if (name == "doodle") t = make_doodle();
    else if (name == "virtual_doodle") t = make_virtual_doodle();
    else if (name == "free") t = make_free();
    else if (name == "singular") t = make_singular();
    else throw std::runtime_error("unknown theory preset: '" + name + "'");
    t.validate();
    return t;
}

Theory parse_theory(const std::string& text) {
    Theory t;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool named = false;
    auto fail = [&](const std::string& msg) {
        throw std::runtime_error("theory:" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        std::vector<std::string> args;
        for (std::string a; ls >> a;) args.push_back(a);
        try {
            if (kw == "theory" && args.size() == 1) {
                t.name = args[0];
                named = true;
            } else if (kw == "tag" && (args.size() == 1 || args.size() == 2)) {
                if (args[0].size() != 1) fail("tag must be a single letter");
                t.tags.insert(args[0][0]);
                if (args.size() == 2) {
                    if (args[1] != "involutive") fail("expected 'involutive'");
                    t.involutive.insert(args[0][0]);
                }
            } else if (kw == "r1" && args.size() == 1) {
                t.r1.insert(t.canon(parse_signed_tag(args[0])));
            } else if (kw == "r2" && args.size() == 1 && args[0].size() == 1) {
                t.r2.insert(args[0][0]);
            } else if (kw == "r3" && args.size() == 3) {
                t.add_r3(parse_signed_tag(args[0]), parse_signed_tag(args[1]),
                         parse_signed_tag(args[2]));
            } else if (kw == "r4" && args.size() == 2) {
                t.add_r4(parse_signed_tag(args[0]), parse_signed_tag(args[1]));
            } else if (kw == "braiding" && args.size() == 1 && args[0].size() == 1) {
                t.braiding_tag = args[0][0];
            } else {
                fail("unrecognized directive '" + kw + "'");
            }
        } catch (const std::runtime_error& e) {
            if (std::string(e.what()).rfind("theory:", 0) == 0) throw;
            fail(e.what());
        }
    }
    if (!named) throw std::runtime_error("theory: missing 'theory <name>' line");
    t.validate();
    return t;
}

std::string emit_theory(const Theory& t) {
    std::ostringstream out;
    out << "theory " << t.name << "\n";
    for (char c : t.tags)
        out << "tag " << c << (t.involutive.count(c) ? " involutive" : "") << "\n";
    for (auto s : t.r1) out << "r1 " << to_string(s) << "\n";
    for (char c : t.r2) out << "r2 " << c << "\n";
    for (auto& tr : t.r3)
        out << "r3 " << to_string(tr[0]) << " " << to_string(tr[1]) << " "
            << to_string(tr[2]) << "\n";
    for (auto& pr : t.r4)
        out << "r4 " << to_string(pr.first) << " " << to_string(pr.second) << "\n";
    out << "braiding " << t.braiding_tag << "\n";
    return out.str();
}

}  // namespace gkd
