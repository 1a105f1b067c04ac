#include "gkd/markov.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "gkd/canonical.hpp"
#include "gkd/seifert.hpp"

namespace gkd {

namespace {

void check(bool cond, const std::string& msg) {
    if (!cond) throw MarkovError(msg);
}

// Dart correspondence between isomorphic diagrams, via their canonical
// relabelings.
std::optional<std::map<DartRef, DartRef>> iso_map(const Diagram& a,
                                                  const Diagram& b) {
    CanonicalLayout la = canonical_layout(a), lb = canonical_layout(b);
    if (la.code != lb.code) return std::nullopt;
    std::map<DartRef, DartRef> m;
    for (size_t i = 0; i < la.crossing_order.size(); ++i) {
        int ca = la.crossing_order[i], cb = lb.crossing_order[i];
        int sa = la.slot_shift.at(ca), sb = lb.slot_shift.at(cb);
        for (int s = 0; s < 4; ++s)
            m[{ca, (sa + s) % 4, false}] = {cb, (sb + s) % 4, false};
    }
    for (size_t i = 0; i < la.loop_order.size(); ++i)
        for (int s = 0; s < 2; ++s)
            m[{la.loop_order[i], s, true}] = {lb.loop_order[i], s, true};
    return m;
}

MoveRecord remap_record(const MoveRecord& r, const Diagram& from,
                        const Diagram& to,
                        const std::map<DartRef, DartRef>& m) {
    MoveRecord out = r;
    for (auto& x : out.darts) x = m.at(x);
    for (auto& e : out.edges) e = to.edge_of(m.at(from.edge(e).tail));
    return out;
}

}  // namespace

std::optional<std::vector<MoveRecord>> remap_tail(Diagram cur,
                                                  Diagram tail_start,
                                                  const std::vector<MoveRecord>& tail,
                                                  const Theory& t) {
    std::vector<MoveRecord> out;
    for (const MoveRecord& r : tail) {
        auto m = iso_map(tail_start, cur);
        if (!m) return std::nullopt;
        MoveRecord rr;
        try {
            rr = remap_record(r, tail_start, cur, *m);
            ApplyResult ar = apply_move(cur, rr, t);
            out.push_back(ar.applied);
            cur = std::move(ar.diagram);
            tail_start = apply_move(tail_start, r, t).diagram;
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    return out;
}

namespace {

struct Certified {
    MoveSequence seq;
    int max_h = 0;
};

// Replay `patch` from K; accept iff it reaches a diagram isomorphic to M
// with every frame except the endpoint at h <= cap.
std::optional<Certified> try_patch(const Diagram& K,
                                   const std::vector<MoveRecord>& patch,
                                   const Diagram& M, const Theory& t,
                                   int cap) {
    Certified c{{K, {}}, height(K)};
    Diagram cur = K;
    if (c.max_h > cap) return std::nullopt;
    for (const MoveRecord& r : patch) {
        ApplyResult ar;
        try {
            ar = apply_move(cur, r, t);
        } catch (const MoveError&) {
            return std::nullopt;
        }
        c.seq.moves.push_back(ar.applied);
        cur = std::move(ar.diagram);
        int h = height(cur);
        if (&r != &patch.back() && h > cap) return std::nullopt;
        c.max_h = std::max(c.max_h, h);
    }
    if (!is_isomorphic(cur, M)) return std::nullopt;
    return c;
}

// Bounded meet-in-the-middle search for an arc-configuration replacement:
// a path of moves K -> ... -> M of length <= 2 * depth whose intermediate
// frames all sit at h <= cap (M itself may exceed the cap).
std::optional<std::vector<MoveRecord>> arc_search(const Diagram& K,
                                                  const Diagram& M,
                                                  const Theory& t, int cap,
                                                  int depth) {
    constexpr size_t kLayerCap = 1200;
    auto moves_of = [&](const Diagram& d) {
        return applicable_moves(d, t, {true, 64, true});
    };

    struct Fwd {
        Diagram d;
        std::vector<MoveRecord> recs;
    };
    std::map<std::string, Fwd> fwd;  // code -> shortest known prefix
    fwd.emplace(canonical_code(K), Fwd{K, {}});
    {
        std::vector<const Fwd*> layer{&fwd.begin()->second};
        for (int dep = 0; dep < depth && !layer.empty(); ++dep) {
            std::vector<const Fwd*> next;
            for (const Fwd* n : layer) {
                for (auto& m : moves_of(n->d)) {
                    if (fwd.size() > kLayerCap) break;
                    try {
                        ApplyResult ar = apply_move(n->d, m, t);
                        if (height(ar.diagram) > cap) continue;
                        std::string code = canonical_code(ar.diagram);
                        if (fwd.count(code)) continue;
                        Fwd nn{std::move(ar.diagram), n->recs};
                        nn.recs.push_back(ar.applied);
                        auto [it, fresh] = fwd.emplace(code, std::move(nn));
                        if (fresh) next.push_back(&it->second);
                    } catch (const MoveError&) {
                    }
                }
            }
            layer = std::move(next);
        }
    }

    // Backward tree from M: each node records the move on its own diagram
    // that steps toward M; replayable glue is built only at join time.
    struct Back {
        Diagram d;
        MoveRecord rec;  // valid on d; applying it steps toward M
        int parent = -1;
    };
    std::vector<Back> arena{{M, {}, -1}};
    auto join = [&](const Fwd& f,
                    int leaf) -> std::optional<std::vector<MoveRecord>> {
        std::vector<MoveRecord> out = f.recs;
        Diagram cur = f.d;
        for (int i = leaf; arena[i].parent >= 0; i = arena[i].parent) {
            auto step = remap_tail(cur, arena[i].d, {arena[i].rec}, t);
            if (!step) return std::nullopt;
            try {
                cur = apply_move(cur, step->front(), t).diagram;
            } catch (const MoveError&) {
                return std::nullopt;
            }
            out.push_back(step->front());
        }
        if (out.empty()) return std::nullopt;
        return out;
    };

    std::set<std::string> seen_back;
    std::vector<int> layer{0};
    for (int dep = 0; dep <= depth; ++dep) {
        std::vector<int> next;
        for (int ni : layer) {
            std::string code = canonical_code(arena[ni].d);
            if (auto it = fwd.find(code); it != fwd.end())
                if (auto full = join(it->second, ni)) return full;
            if (dep == depth || !seen_back.insert(code).second) continue;
            for (auto& m : moves_of(arena[ni].d)) {
                if (next.size() > kLayerCap) break;
                try {
                    ApplyResult ar = apply_move(arena[ni].d, m, t);
                    if (height(ar.diagram) > cap) continue;
                    arena.push_back({std::move(ar.diagram), ar.inverse, ni});
                    next.push_back((int)arena.size() - 1);
                } catch (const MoveError&) {
                }
            }
        }
        layer = std::move(next);
    }
    return std::nullopt;
}

RewriteOutcome certify(RewriteStatus status, Certified c, std::string note) {
    RewriteOutcome out;
    out.status = status;
    out.replacement = std::move(c.seq);
    out.endpoints_match = true;
    out.max_h = c.max_h;
    out.note = std::move(note);
    return out;
}

RewriteOutcome unsupported(std::string note) {
    RewriteOutcome out;
    out.note = std::move(note);
    return out;
}

std::vector<MoveRecord> v_plus_moves(const Diagram& d, const Theory& t) {
    std::vector<MoveRecord> out;
    for (auto& m : applicable_moves(d, t, {true, 120, true}))
        if (m.kind == MoveKind::V && m.sign == +1) out.push_back(m);
    return out;
}

}  // namespace

int HProfile::max_h() const {
    return *std::max_element(values.begin(), values.end());
}

HProfile replay(const MoveSequence& seq, const Theory& t) {
    std::vector<Diagram> frames = replay_diagrams(seq, t);
    HProfile p;
    for (auto& d : frames) p.values.push_back(height(d));
    int n = (int)p.values.size();
    for (int i = 1; i + 1 < n; ++i) {
        if (p.values[i] > p.values[i - 1] && p.values[i] > p.values[i + 1])
            p.peaks.push_back(i);
        if (p.values[i] < p.values[i - 1] && p.values[i] < p.values[i + 1])
            p.divots.push_back(i);
    }
    for (int a = 0; a < n;) {
        int b = a;
        while (b + 1 < n && p.values[b + 1] == p.values[a]) ++b;
        if (b > a) p.plateaus.push_back({a, b});
        a = b + 1;
    }
    for (size_t j = 0; j < seq.moves.size(); ++j) {
        if (p.values[j + 1] == p.values[j]) continue;
        MoveKind k = seq.moves[j].kind;
        if (k != MoveKind::V && k != MoveKind::R1) p.flagged.push_back((int)j);
    }
    return p;
}

std::string to_string(RewriteStatus s) {
    switch (s) {
        case RewriteStatus::cancelled: return "cancelled";
        case RewriteStatus::replaced: return "replaced";
        case RewriteStatus::interchanged: return "interchanged";
        case RewriteStatus::unsupported: return "unsupported";
    }
    return "?";
}

RewriteOutcome peak_rewrite(const MoveSequence& seq, int i, const Theory& t) {
    check(classify(t).normal, "peak rewriting needs a normal theory");
    std::vector<Diagram> frames = replay_diagrams(seq, t);
    int n = (int)frames.size();
    check(i >= 1 && i + 1 < n, "peak index out of range");
    const Diagram& K = frames[i - 1];
    const Diagram& M = frames[i + 1];
    int hK = height(K), hL = height(frames[i]), hM = height(M);
    check(hL > hK && hL > hM, "position is not a peak");
    const MoveRecord& raise = seq.moves[i - 1];
    const MoveRecord& fall = seq.moves[i];
    int cap = hL - 1;

    if (is_isomorphic(K, M))
        return certify(RewriteStatus::cancelled, {{K, {}}, hK},
                       "same-locus pair cancels");
    if (auto c = try_patch(K, {fall, raise}, M, t, cap))
        return certify(RewriteStatus::interchanged, std::move(*c),
                       "disjoint tracks interchanged");
    for (auto& v : v_plus_moves(K, t)) {
        ApplyResult ar;
        try {
            ar = apply_move(K, v, t);
        } catch (const MoveError&) {
            continue;
        }
        if (auto c = try_patch(K, {ar.applied, raise, fall, ar.inverse}, M, t,
                               cap))
            return certify(RewriteStatus::replaced, std::move(*c),
                           "conjugated by a V move");
    }
    if (auto recs = arc_search(K, M, t, cap, 2))
        if (auto c = try_patch(K, *recs, M, t, cap))
            return certify(RewriteStatus::replaced, std::move(*c),
                           "arc configuration replaced");
    return unsupported("peak configuration outside implemented cases");
}

RewriteOutcome transport_rewrite(const MoveSequence& seq, int i,
                                 const Theory& t) {
    check(classify(t).normal, "transport rewriting needs a normal theory");
    std::vector<Diagram> frames = replay_diagrams(seq, t);
    int n = (int)frames.size();
    check(i >= 0 && i + 2 < n, "transport index out of range");
    const Diagram& K = frames[i];
    const Diagram& M = frames[i + 2];
    int hK = height(K), hL = height(frames[i + 1]), hM = height(M);
    check(hL > hK, "first move does not raise h");
    check(hM == hL, "second move is not h-neutral");
    const MoveRecord& raise = seq.moves[i];
    const MoveRecord& neutral = seq.moves[i + 1];
    int cap = hM - 1;

    if (auto c = try_patch(K, {neutral, raise}, M, t, cap))
        return certify(RewriteStatus::interchanged, std::move(*c),
                       "disjoint neighbourhood interchanged");
    for (auto& v : v_plus_moves(K, t)) {
        ApplyResult ar;
        try {
            ar = apply_move(K, v, t);
        } catch (const MoveError&) {
            continue;
        }
        if (auto c = try_patch(K, {ar.applied, raise, neutral, ar.inverse}, M,
                               t, cap))
            return certify(RewriteStatus::replaced, std::move(*c),
                           "conjugated by a V move");
    }
    if (auto recs = arc_search(K, M, t, cap, 2))
        if (auto c = try_patch(K, *recs, M, t, cap))
            return certify(RewriteStatus::replaced, std::move(*c),
                           "crossing tracks replaced");
    return unsupported("transport configuration outside implemented cases");
}

NormalizeOutcome markov_normalize(const MoveSequence& seq, const Theory& t,
                                  int budget) {
    check(classify(t).normal, "normalization needs a normal theory");
    NormalizeOutcome out;
    out.sequence = seq;

    for (int step = 0; step < budget; ++step) {
        std::vector<Diagram> frames = replay_diagrams(out.sequence, t);
        std::vector<int> values;
        for (auto& d : frames) values.push_back(height(d));
        check(values.front() == 0 && values.back() == 0,
              "endpoints are not braided");
        int maxh = *std::max_element(values.begin(), values.end());
        if (maxh == 0) {
            out.braided = true;
            return out;
        }
        int a = (int)(std::find(values.begin(), values.end(), maxh) -
                      values.begin());
        int b = a;
        while (values[b + 1] == maxh) ++b;  // endpoints are 0, so b+1 < size

        RewriteOutcome oc = a == b
                                ? peak_rewrite(out.sequence, a, t)
                                : transport_rewrite(out.sequence, a - 1, t);
        if (oc.status == RewriteStatus::unsupported) {
            out.failure = oc.note;
            return out;
        }
        char line[160];
        std::snprintf(line, sizeof line, "%s at %d..%d (h=%d): %s",
                      a == b ? "peak" : "transport", a - 1, a + 1, maxh,
                      (to_string(oc.status) + ", " + oc.note).c_str());
        out.log.push_back(line);

        // Splice the certified segment over moves [a-1, a+1) and rebase
        // the rest of the sequence onto its endpoint.
        MoveSequence next{out.sequence.initial, {}};
        next.moves.assign(out.sequence.moves.begin(),
                          out.sequence.moves.begin() + (a - 1));
        Diagram end = frames[a - 1];
        for (auto& r : oc.replacement.moves) {
            next.moves.push_back(r);
            end = apply_move(end, r, t).diagram;
        }
        std::vector<MoveRecord> rest(out.sequence.moves.begin() + (a + 1),
                                     out.sequence.moves.end());
        auto rebased = remap_tail(end, frames[a + 1], rest, t);
        if (!rebased) {
            out.failure = "failed to rebase the sequence tail";
            return out;
        }
        next.moves.insert(next.moves.end(), rebased->begin(), rebased->end());
        out.sequence = std::move(next);
    }
    out.failure = "rewrite budget exhausted";
    return out;
}

}  // namespace gkd
