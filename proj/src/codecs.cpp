#include "gkd/codecs.hpp"

#include <map>
#include <sstream>
#include <vector>

#include "gkd/canonical.hpp"
#include "gkd/markov.hpp"

namespace gkd {

namespace {

[[noreturn]] void fail(const std::string& fmt, int line, const std::string& msg) {
    throw CodecError(fmt + ":" + std::to_string(line) + ": " + msg);
}

struct Line {
    int no;
    std::vector<std::string> tokens;
};

std::vector<Line> tokenize(const std::string& text) {
    std::vector<Line> out;
    std::istringstream in(text);
    std::string raw;
    int no = 0;
    while (std::getline(in, raw)) {
        ++no;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        Line l{no, {}};
        for (std::string tok; ls >> tok;) l.tokens.push_back(tok);
        if (!l.tokens.empty()) out.push_back(std::move(l));
    }
    return out;
}

int parse_int(const std::string& fmt, int line, const std::string& s) {
    try {
        size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (...) {
        fail(fmt, line, "expected an integer, got '" + s + "'");
    }
}

bool is_theory_directive(const std::string& kw) {
    return kw == "theory" || kw == "tag" || kw == "r1" || kw == "r2" ||
           kw == "r3" || kw == "r4" || kw == "braiding";
}

// Shared body reader for gkd and moveseq files.  Consumes the version
// line, theory directives, and the X/O/P lines; leaves anything else
// (move lines) to the caller.
struct Body {
    int version = 1;
    Theory theory;
    Diagram diagram;
    size_t next = 0;  // first unconsumed line index
};

Body parse_body(const std::string& fmt, const std::vector<Line>& lines,
                const std::string& header) {
    Body b;
    size_t i = 0;
    if (i >= lines.size() || lines[i].tokens[0] != header)
        fail(fmt, lines.empty() ? 1 : lines[0].no,
             "expected '" + header + " <version>' header");
    if (lines[i].tokens.size() != 2)
        fail(fmt, lines[i].no, "malformed header");
    b.version = parse_int(fmt, lines[i].no, lines[i].tokens[1]);
    if (b.version != 1)
        fail(fmt, lines[i].no, "unsupported version " + std::to_string(b.version));
    ++i;

    // Theory: a bare `theory <name>` naming a preset, or a full inline
    // block of theory directives.
    std::ostringstream ttext;
    int tlines = 0, tline_no = lines.size() > i ? lines[i].no : 1;
    std::string tname;
    for (; i < lines.size() && is_theory_directive(lines[i].tokens[0]); ++i) {
        for (size_t k = 0; k < lines[i].tokens.size(); ++k)
            ttext << (k ? " " : "") << lines[i].tokens[k];
        ttext << "\n";
        if (lines[i].tokens[0] == "theory" && lines[i].tokens.size() == 2)
            tname = lines[i].tokens[1];
        ++tlines;
        tline_no = lines[i].no;
    }
    try {
        if (tlines == 1 && !tname.empty())
            b.theory = preset(tname);
        else if (tlines > 0)
            b.theory = parse_theory(ttext.str());
        else
            fail(fmt, tline_no, "missing theory");
    } catch (const CodecError&) {
        throw;
    } catch (const std::exception& e) {
        fail(fmt, tline_no, e.what());
    }

    std::vector<CrossingRecord> crossings;
    std::vector<LoopRecord> loops;
    std::vector<PlacementRecord> placements;
    auto dart = [&](int no, const std::string& s) {
        try {
            return parse_dart(s);
        } catch (const std::exception& e) {
            fail(fmt, no, e.what());
        }
    };
    for (; i < lines.size(); ++i) {
        const Line& l = lines[i];
        const std::string& kw = l.tokens[0];
        if (kw == "X") {
            if (l.tokens.size() != 7)
                fail(fmt, l.no, "X line needs an id, a tag, and four edge ends");
            CrossingRecord cr;
            cr.id = parse_int(fmt, l.no, l.tokens[1]);
            try {
                cr.tag = parse_signed_tag(l.tokens[2]);
            } catch (const std::exception& e) {
                fail(fmt, l.no, e.what());
            }
            for (int s = 0; s < 4; ++s) {
                std::string end = l.tokens[3 + s];
                char dir = end.empty() ? '?' : end.back();
                if (dir != 'i' && dir != 'o')
                    fail(fmt, l.no, "edge end '" + end + "' must end in i or o");
                end.pop_back();
                cr.ends[s] = {parse_int(fmt, l.no, end), dir == 'i'};
            }
            crossings.push_back(cr);
        } else if (kw == "O") {
            if (l.tokens.size() < 3 || l.tokens.size() > 4)
                fail(fmt, l.no, "O line: O <id> <container-dart|sphere> [-]");
            LoopRecord lr;
            lr.id = parse_int(fmt, l.no, l.tokens[1]);
            if (l.tokens[2] != "sphere") lr.container = dart(l.no, l.tokens[2]);
            if (l.tokens.size() == 4) {
                if (l.tokens[3] != "-") fail(fmt, l.no, "expected '-' flag");
                lr.own_head_side = false;
            }
            loops.push_back(lr);
        } else if (kw == "P") {
            if (l.tokens.size() != 3)
                fail(fmt, l.no, "P line: P <own-dart> <container-dart>");
            placements.push_back({dart(l.no, l.tokens[1]), dart(l.no, l.tokens[2])});
        } else {
            break;  // not part of the diagram body
        }
    }
    try {
        b.diagram = build_diagram(crossings, loops, placements);
    } catch (const DiagramError& e) {
        fail(fmt, lines.empty() ? 1 : lines[0].no, e.what());
    }
    for (auto& [id, c] : b.diagram.crossings)
        if (!b.theory.has_tag(c.tag.letter))
            fail(fmt, 1, std::string("crossing tag '") + c.tag.letter +
                             "' is not in the theory");
    b.next = i;
    return b;
}

std::string emit_theory_ref(const Theory& t) {
    try {
        if (emit_theory(preset(t.name)) == emit_theory(t))
            return "theory " + t.name + "\n";
    } catch (const std::exception&) {
    }
    return emit_theory(t);
}

// Canonical relabeling derived from canonical_layout.
struct Renaming {
    std::map<int, int> cross, shift, loop, edge;

    DartRef map(DartRef d) const {
        if (d.loop) return {loop.at(d.owner), d.slot, true};
        return {cross.at(d.owner), (d.slot - shift.at(d.owner) + 4) % 4, false};
    }
};

Renaming renaming(const Diagram& d, const CanonicalLayout& lay) {
    Renaming r;
    for (size_t i = 0; i < lay.crossing_order.size(); ++i) {
        r.cross[lay.crossing_order[i]] = (int)i + 1;
        r.shift[lay.crossing_order[i]] = lay.slot_shift.at(lay.crossing_order[i]);
    }
    for (size_t i = 0; i < lay.loop_order.size(); ++i)
        r.loop[lay.loop_order[i]] = (int)i + 1;
    int next_edge = 1;
    for (int c : lay.crossing_order)
        for (int s = 0; s < 4; ++s) {
            int e = d.edge_of({c, (r.shift.at(c) + s) % 4, false});
            if (!r.edge.count(e)) r.edge[e] = next_edge++;
        }
    return r;
}

std::string emit_body(const Diagram& d) {
    CanonicalLayout lay = canonical_layout(d);
    Renaming r = renaming(d, lay);
    std::ostringstream out;
    for (int c : lay.crossing_order) {
        out << "X " << r.cross.at(c) << ' ' << to_string(d.crossings.at(c).tag);
        for (int s = 0; s < 4; ++s) {
            DartRef dart{c, (r.shift.at(c) + s) % 4, false};
            out << ' ' << r.edge.at(d.edge_of(dart)) << (d.is_out(dart) ? 'o' : 'i');
        }
        out << "\n";
    }
    for (int L : lay.loop_order) {
        out << "O " << r.loop.at(L);
        const Placement* tie = nullptr;
        for (auto& p : lay.placements)
            if (p.own.loop && p.own.owner == L) tie = &p;
        if (!tie)
            out << " sphere";
        else
            out << ' ' << to_string(r.map(tie->container))
                << (tie->own.slot == 0 ? " -" : "");
        out << "\n";
    }
    for (auto& p : lay.placements)
        if (!p.own.loop)
            out << "P " << to_string(r.map(p.own)) << ' '
                << to_string(r.map(p.container)) << "\n";
    return out.str();
}

std::string emit_move_line(const MoveRecord& m) {
    std::ostringstream out;
    out << "move " << to_string(m.kind) << ' '
        << (m.sign > 0 ? "+1" : m.sign < 0 ? "-1" : "0");
    for (auto& t : m.tags) out << " t:" << to_string(t);
    for (auto& d : m.darts) out << " d:" << to_string(d);
    for (int e : m.edges) out << " e:" << e;
    out << " h:" << m.h_delta << "\n";
    return out.str();
}

MoveRecord parse_move_line(const std::string& fmt, const Line& l) {
    if (l.tokens.size() < 3)
        fail(fmt, l.no, "move line: move <kind> <sign> [t:|d:|e:]* h:<dh>");
    MoveRecord m;
    try {
        m.kind = parse_move_kind(l.tokens[1]);
    } catch (const std::exception& e) {
        fail(fmt, l.no, e.what());
    }
    m.sign = parse_int(fmt, l.no, l.tokens[2]);
    for (size_t k = 3; k < l.tokens.size(); ++k) {
        const std::string& tok = l.tokens[k];
        if (tok.size() < 3 || tok[1] != ':')
            fail(fmt, l.no, "bad move token '" + tok + "'");
        std::string val = tok.substr(2);
        try {
            switch (tok[0]) {
                case 't': m.tags.push_back(parse_signed_tag(val)); break;
                case 'd': m.darts.push_back(parse_dart(val)); break;
                case 'e': m.edges.push_back(parse_int(fmt, l.no, val)); break;
                case 'h': m.h_delta = parse_int(fmt, l.no, val); break;
                default: fail(fmt, l.no, "bad move token '" + tok + "'");
            }
        } catch (const CodecError&) {
            throw;
        } catch (const std::exception& e) {
            fail(fmt, l.no, e.what());
        }
    }
    return m;
}

}  // namespace

GkdDocument parse_gkd(const std::string& text) {
    auto lines = tokenize(text);
    Body b = parse_body("gkd", lines, "gkd");
    if (b.next != lines.size())
        fail("gkd", lines[b.next].no,
             "unrecognized line '" + lines[b.next].tokens[0] + "'");
    return {b.version, std::move(b.theory), std::move(b.diagram)};
}

std::string emit_gkd(const Diagram& d, const Theory& t) {
    return "gkd 1\n" + emit_theory_ref(t) + emit_body(d);
}

BraidWord parse_braid(const std::string& text) {
    auto lines = tokenize(text);
    if (lines.size() != 1 || lines[0].tokens[0] != "braid")
        fail("braid", lines.empty() ? 1 : lines[0].no,
             "expected a single 'braid n=<k>: ...' line");
    const Line& l = lines[0];
    if (l.tokens.size() < 2 || l.tokens[1].rfind("n=", 0) != 0 ||
        l.tokens[1].back() != ':')
        fail("braid", l.no, "expected 'n=<k>:' after 'braid'");
    BraidWord w;
    w.strands = parse_int("braid", l.no,
                          l.tokens[1].substr(2, l.tokens[1].size() - 3));
    if (w.strands < 1) fail("braid", l.no, "need at least one strand");
    for (size_t k = 2; k < l.tokens.size(); ++k) {
        const std::string& tok = l.tokens[k];
        auto open = tok.find('(');
        if (tok[0] != 's' || open == std::string::npos || tok.back() != ')')
            fail("braid", l.no, "bad letter '" + tok + "'");
        int idx = parse_int("braid", l.no, tok.substr(1, open - 1));
        if (idx < 1 || idx >= w.strands)
            fail("braid", l.no,
                 "letter index " + std::to_string(idx) + " out of range");
        try {
            w.letters.push_back(
                {idx, parse_signed_tag(tok.substr(open + 1, tok.size() - open - 2))});
        } catch (const std::exception& e) {
            fail("braid", l.no, e.what());
        }
    }
    return w;
}

std::string emit_braid(const BraidWord& w) {
    std::ostringstream out;
    out << "braid n=" << w.strands << ":";
    for (auto& [idx, tag] : w.letters)
        out << " s" << idx << '(' << to_string(tag) << ')';
    out << "\n";
    return out.str();
}

MoveSeqDocument parse_moveseq(const std::string& text) {
    auto lines = tokenize(text);
    Body b = parse_body("moveseq", lines, "moveseq");
    MoveSeqDocument doc{std::move(b.theory), {std::move(b.diagram), {}}};
    Diagram cur = doc.sequence.initial;
    for (size_t i = b.next; i < lines.size(); ++i) {
        if (lines[i].tokens[0] != "move")
            fail("moveseq", lines[i].no,
                 "unrecognized line '" + lines[i].tokens[0] + "'");
        MoveRecord m = parse_move_line("moveseq", lines[i]);
        try {
            ApplyResult ar = apply_move(cur, m, doc.theory);
            doc.sequence.moves.push_back(ar.applied);
            cur = std::move(ar.diagram);
        } catch (const std::exception& e) {
            fail("moveseq", lines[i].no,
                 std::string("move does not apply: ") + e.what());
        }
    }
    return doc;
}

MoveRecord parse_move(const std::string& text) {
    auto lines = tokenize(text);
    if (lines.size() != 1)
        throw CodecError("move: expected a single move line");
    Line l = lines[0];
    if (l.tokens[0] != "move") l.tokens.insert(l.tokens.begin(), "move");
    return parse_move_line("move", l);
}

std::string emit_moveseq(const MoveSequence& seq, const Theory& t) {
    std::string head = "moveseq 1\n" + emit_theory_ref(t) + emit_body(seq.initial);
    // Rebase the records onto the canonical relabeling of the initial
    // diagram so equal sequences emit identical bytes.
    Diagram relabeled =
        parse_moveseq(head).sequence.initial;  // parse of the emitted body
    auto recs = remap_tail(relabeled, seq.initial, seq.moves, t);
    if (!recs)
        throw CodecError("moveseq: records do not survive relabeling");
    std::string out = head;
    for (auto& m : *recs) out += emit_move_line(m);
    return out;
}

}  // namespace gkd
