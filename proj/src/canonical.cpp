#include "gkd/canonical.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace gkd {

namespace {

// Deterministic breadth-first relabeling of one component from a start dart.
struct Traversal {
    std::vector<int> crossing_order;   // discovery order
    std::map<int, int> disc;           // crossing id -> discovery index
    std::map<int, int> entry;          // crossing id -> entry slot
    std::vector<DartRef> dart_order;
    std::string code;
};

Traversal traverse_comp(const Diagram& d, DartRef start) {
    Traversal t;
    if (start.loop) {
        // A loop has no orientation-preserving symmetry swapping its sides,
        // so the walk order is pinned to (right face, left face).
        t.dart_order = {{start.owner, 0, true}, {start.owner, 1, true}};
        t.code = "O";
        return t;
    }
    auto visit = [&](DartRef dart) {
        if (!t.disc.count(dart.owner)) {
            t.disc[dart.owner] = (int)t.crossing_order.size();
            t.entry[dart.owner] = dart.slot;
            t.crossing_order.push_back(dart.owner);
        }
    };
    visit(start);
    for (size_t i = 0; i < t.crossing_order.size(); ++i) {
        int c = t.crossing_order[i];
        int e = t.entry[c];
        for (int k = 0; k < 4; ++k) {
            DartRef dart{c, (e + k) % 4, false};
            t.dart_order.push_back(dart);
            visit(d.alpha(dart));
        }
    }
    std::string code;
    code.reserve(24 * t.crossing_order.size());
    for (int c : t.crossing_order) {
        code += 'X';
        code += to_string(d.crossings.at(c).tag);
        int e = t.entry[c];
        for (int k = 0; k < 4; ++k) {
            DartRef dart{c, (e + k) % 4, false};
            DartRef p = d.alpha(dart);
            code += d.is_out(dart) ? 'o' : 'i';
            code += std::to_string(t.disc.at(p.owner));
            code += '.';
            code += std::to_string((p.slot - t.entry.at(p.owner) + 4) % 4);
        }
    }
    t.code = std::move(code);
    return t;
}

struct Analysis {
    const Diagram& d;
    FaceSet fs;
    std::map<int, std::vector<DartRef>> comp_darts;        // comp key -> darts
    std::map<int, std::string> comp_code;                  // bare component code
    std::map<int, std::vector<DartRef>> opt_starts;        // argmin start darts
    std::map<std::pair<int, int>, std::string> memo_comp;  // (comp, parent face)
    std::map<std::pair<int, int>, std::string> memo_face;  // (face, from comp)
    std::map<int, std::vector<int>> face_comps;            // face -> comp keys
    std::map<DartRef, Traversal> trav_cache;

    explicit Analysis(const Diagram& dd) : d(dd), fs(trace_faces(dd)) {
        for (auto dart : d.all_darts()) comp_darts[d.component_of(dart)].push_back(dart);
        for (auto& [c, darts] : comp_darts) {
            // The code opens with the start crossing's tag, so only starts
            // on minimal-tag crossings can realize the minimum.  Loop
            // components read the same from either end.
            std::string min_tag;
            for (auto s : darts)
                if (!s.loop) {
                    std::string ts = to_string(d.crossings.at(s.owner).tag);
                    if (min_tag.empty() || ts < min_tag) min_tag = std::move(ts);
                }
            for (auto s : darts) {
                if (s.loop ? s.slot != 0
                           : to_string(d.crossings.at(s.owner).tag) != min_tag)
                    continue;
                auto& tr = trav(s);
                auto it = comp_code.find(c);
                if (it == comp_code.end() || tr.code < it->second) {
                    comp_code[c] = tr.code;
                    opt_starts[c] = {s};
                } else if (tr.code == it->second) {
                    opt_starts[c].push_back(s);
                }
            }
        }
        for (size_t w = 0; w < fs.walks.size(); ++w) {
            int f = fs.face_of_walk[w];
            int c = d.component_of(fs.walks[w].front());
            auto& v = face_comps[f];
            if (std::find(v.begin(), v.end(), c) == v.end()) v.push_back(c);
        }
    }

    const Traversal& trav(DartRef s) {
        auto it = trav_cache.find(s);
        if (it == trav_cache.end())
            it = trav_cache.emplace(s, traverse_comp(d, s)).first;
        return it->second;
    }

    // Walk indices of a component in canonical order under a traversal.
    std::vector<int> walk_order(const Traversal& tr) {
        std::vector<int> order;
        std::set<int> seen;
        for (auto dart : tr.dart_order) {
            int w = fs.walk_of.at(dart);
            if (seen.insert(w).second) order.push_back(w);
        }
        return order;
    }

    std::string code_comp(int comp, int parent_face) {
        auto key = std::make_pair(comp, parent_face);
        auto it = memo_comp.find(key);
        if (it != memo_comp.end()) return it->second;
        memo_comp[key] = "?";  // containment is acyclic; never revisited
        std::string best;
        for (auto s : opt_starts.at(comp)) {
            auto& tr = trav(s);
            std::ostringstream cand;
            cand << comp_code.at(comp) << '[';
            bool first = true;
            for (int w : walk_order(tr)) {
                if (!first) cand << ',';
                first = false;
                int f = fs.face_of_walk[w];
                if (f == parent_face)
                    cand << '^';
                else
                    cand << code_face(f, comp);
            }
            cand << ']';
            if (best.empty() || cand.str() < best) best = cand.str();
        }
        memo_comp[key] = best;
        return best;
    }

    std::string code_face(int face, int from_comp) {
        auto key = std::make_pair(face, from_comp);
        auto it = memo_face.find(key);
        if (it != memo_face.end()) return it->second;
        std::vector<std::string> parts;
        for (int c : face_comps.at(face))
            if (c != from_comp) parts.push_back(code_comp(c, face));
        std::sort(parts.begin(), parts.end());
        std::string out = "(";
        for (size_t i = 0; i < parts.size(); ++i) {
            if (i) out += ' ';
            out += parts[i];
        }
        out += ')';
        memo_face[key] = out;
        return out;
    }

    // Chosen start for (comp, parent_face): first optimal start in dart order
    // achieving the memoized minimum.
    DartRef chosen_start(int comp, int parent_face) {
        std::string want = code_comp(comp, parent_face);
        for (auto s : opt_starts.at(comp)) {
            auto& tr = trav(s);
            std::ostringstream cand;
            cand << comp_code.at(comp) << '[';
            bool first = true;
            for (int w : walk_order(tr)) {
                if (!first) cand << ',';
                first = false;
                int f = fs.face_of_walk[w];
                if (f == parent_face)
                    cand << '^';
                else
                    cand << code_face(f, comp);
            }
            cand << ']';
            if (cand.str() == want) return s;
        }
        throw DiagramError("internal: canonical start not found");
    }
};

}  // namespace

std::string canonical_code(const Diagram& d) {
    if (d.empty()) return "empty";
    Analysis a(d);
    std::string best;
    for (auto& [c, darts] : a.comp_darts) {
        std::string cand = a.code_comp(c, -1);
        if (best.empty() || cand < best) best = cand;
    }
    return best;
}

CanonicalLayout canonical_layout(const Diagram& d) {
    CanonicalLayout out;
    if (d.empty()) {
        out.code = "empty";
        return out;
    }
    Analysis a(d);
    int root = -1;
    std::string best;
    for (auto& [c, darts] : a.comp_darts) {
        std::string cand = a.code_comp(c, -1);
        if (best.empty() || cand < best) {
            best = cand;
            root = c;
        }
    }
    out.code = best;

    // Pre-order emission walk from the chosen root.
    struct Frame {
        int comp;
        int parent_face;
        DartRef container_rep;  // dart in the parent component's walk
    };
    std::vector<Frame> stack{{root, -1, {}}};
    std::set<int> visited;
    while (!stack.empty()) {
        Frame fr = stack.back();
        stack.pop_back();
        if (!visited.insert(fr.comp).second) continue;
        DartRef start = a.chosen_start(fr.comp, fr.parent_face);
        const Traversal& tr = a.trav(start);
        for (int c : tr.crossing_order) {
            out.crossing_order.push_back(c);
            out.slot_shift[c] = tr.entry.at(c);
        }
        if (start.loop) out.loop_order.push_back(start.owner);
        if (fr.parent_face >= 0) {
            // Own representative: first dart of the walk facing the parent.
            DartRef own{};
            for (auto dart : tr.dart_order)
                if (a.fs.face_of(dart) == fr.parent_face) {
                    own = dart;
                    break;
                }
            out.placements.push_back({own, fr.container_rep});
        }
        // Children, grouped per walk in canonical order, sorted by code.
        for (int w : a.walk_order(tr)) {
            int f = a.fs.face_of_walk[w];
            if (f == fr.parent_face) continue;
            DartRef rep{};
            for (auto dart : tr.dart_order)
                if (a.fs.walk_of.at(dart) == w) {
                    rep = dart;
                    break;
                }
            std::vector<std::pair<std::string, int>> kids;
            for (int c2 : a.face_comps.at(f))
                if (c2 != fr.comp && !visited.count(c2))
                    kids.push_back({a.code_comp(c2, f), c2});
            std::sort(kids.begin(), kids.end());
            for (auto it = kids.rbegin(); it != kids.rend(); ++it)
                stack.push_back({it->second, f, rep});
        }
    }
    return out;
}

bool is_isomorphic(const Diagram& a, const Diagram& b) {
    return canonical_code(a) == canonical_code(b);
}

}  // namespace gkd
