// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure.  Run via ctest (target: gkd_acceptance).
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <future>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include "fixtures.hpp"
#include "gkd/braiding.hpp"
#include "gkd/canonical.hpp"
#include "gkd/codecs.hpp"
#include "gkd/markov.hpp"
#include "gkd/seifert.hpp"
#include "random_gen.hpp"

using namespace gkd;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

struct Outcome {
    bool pass = true;
    std::string detail;
};

template <typename F>
void criterion(int n, const char* name, double limit_s, F body) {
    Outcome o;
    auto t0 = Clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (secs > limit_s) {
        o.pass = false;
        o.detail += (o.detail.empty() ? "" : "; ") + std::string("over time limit");
    }
    if (!o.pass) ++g_failures;
    std::printf("%s  criterion %d (%s): %s[%.2fs / %.0fs]\n",
                o.pass ? "PASS" : "FAIL", n, name,
                o.detail.empty() ? "" : (o.detail + " ").c_str(), secs, limit_s);
    std::fflush(stdout);
}

void expect(Outcome& o, bool cond, const std::string& what) {
    if (cond) return;
    o.pass = false;
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += what;
}

bool connected(const Diagram& d) { return d.component_keys().size() == 1; }

// Shared corpus for criteria 3-5: random connected diagrams, <= 8 crossings.
std::vector<Diagram> corpus(int count) {
    Theory t = preset("classical");
    std::mt19937 rng(20260827);
    std::vector<Diagram> out;
    while ((int)out.size() < count) {
        Diagram d = randgen::random_diagram(rng, t, 8, 6);
        if (connected(d)) out.push_back(std::move(d));
    }
    return out;
}

// Random relabeling: permute the crossing, loop, and edge id spaces.
Diagram relabel(const Diagram& d, std::mt19937& rng) {
    std::map<int, int> cmap, lmap, emap;
    auto permute = [&](auto& ids, std::map<int, int>& out, int offset) {
        std::vector<int> tgt = ids;
        std::shuffle(tgt.begin(), tgt.end(), rng);
        for (size_t i = 0; i < ids.size(); ++i) out[ids[i]] = tgt[i] + offset;
    };
    std::vector<int> cids, lids, eids;
    for (auto& [id, c] : d.crossings) cids.push_back(id);
    for (auto& [id, l] : d.loops) lids.push_back(id);
    for (auto& [id, e] : d.edges) eids.push_back(id);
    permute(cids, cmap, 100);
    permute(lids, lmap, 50);
    permute(eids, emap, 20);
    auto md = [&](DartRef x) -> DartRef {
        if (x.loop) return {lmap.at(x.owner), x.slot, true};
        return {cmap.at(x.owner), x.slot, false};
    };
    Diagram out;
    for (auto& [id, c] : d.crossings) out.crossings[cmap[id]] = {cmap[id], c.tag};
    for (auto& [id, l] : d.loops) out.loops[lmap[id]] = {lmap[id]};
    for (auto& [id, e] : d.edges)
        out.edges[emap[id]] = {emap[id], md(e.tail), md(e.head)};
    for (auto& p : d.placements) out.placements.push_back({md(p.own), md(p.container)});
    out.touch();
    out.validate();
    return out;
}

}  // namespace

// ------------------------------------------------------------------ 1

static void c1(Outcome& o) {
    auto s = smooth(fixtures::worked_example());
    auto coh = coherence(s);
    expect(o, s.cycles.size() == 4, "expected 4 cycles");
    expect(o, s.polar_cycles.size() == 4, "all cycles polar");
    std::set<std::pair<int, int>> pairs;
    for (auto& b : s.bridges)
        pairs.insert({std::min(b.cycle_from, b.cycle_to),
                      std::max(b.cycle_from, b.cycle_to)});
    // s1-s2, s1-s4, s3-s2, s3-s4 (0-based).
    expect(o, pairs == std::set<std::pair<int, int>>{{0, 1}, {0, 3}, {1, 2}, {2, 3}},
           "bridge incidences");
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            bool incoh = (i == 0 && j == 2) || (i == 1 && j == 3);
            expect(o, coh.coherent[i][j] == !incoh, "coherence pattern");
        }
    expect(o, coh.h == 2, "h = 2");
    expect(o, coh.per_cycle == std::vector<int>{1, 1, 1, 1}, "per-cycle h");
}

// ------------------------------------------------------------------ 2

static void c2(Outcome& o) {
    Theory cl = preset("classical");
    auto ccl = classify(cl);
    expect(o, ccl.normal, "classical normal");
    expect(o,
           ccl.dominant == std::set<SignedTag>{{'r', true}, {'r', false}},
           "classical dominant {r, ~r}");

    Theory vi = preset("virtual");
    expect(o, vi.involutive.count('v') == 1, "v involutive");
    for (SignedTag a : vi.signed_tags())
        expect(o, dominates(vi, {'v', true}, a), "v dominates all tags");

    Theory we = preset("welded");
    expect(o, we.r3_allowed({'r', false}, {'w', true}, {'r', true}),
           "welded allows R3'(~r, w, r)");
    expect(o, !we.r3_allowed({'r', true}, {'w', true}, {'r', false}),
           "welded forbids R3'(r, w, ~r)");

    Theory si = preset("singular");
    expect(o, !si.r1_allowed({'s', true}), "singular forbids R1(s)");
    expect(o, si.r4_allowed({'r', true}, {'s', true}), "singular allows R4(r, s)");

    Theory doo = preset("doodle");
    auto cdoo = classify(doo);
    expect(o, cdoo.regular && !cdoo.normal, "doodle regular, not normal");
}

// ---------------------------------------------------------------- 3-5

static void c3(Outcome& o, const std::vector<Diagram>& pool, const Theory& t) {
    int applied = 0;
    for (const Diagram& d : pool) {
        auto coh = coherence(smooth(d));
        int sum = 0;
        for (int v : coh.per_cycle) sum += v;
        expect(o, 2 * coh.h == sum, "2h = sum of h(s)");
        for (auto& m : applicable_moves(d, t, {true, 200, true})) {
            if (m.kind != MoveKind::V || m.sign != +1) continue;
            Diagram nd = apply_move(d, m, t).diagram;
            auto ncoh = coherence(smooth(nd));
            expect(o, ncoh.h == coh.h - 1, "V+ lowers h by exactly 1");
            int nsum = 0;
            for (int v : ncoh.per_cycle) nsum += v;
            expect(o, 2 * ncoh.h == nsum, "2h = sum of h(s) after V+");
            ++applied;
        }
        if (!o.pass) return;
    }
    expect(o, applied >= 1000, "enough V+ applications");
}

static void c4(Outcome& o, const std::vector<Diagram>& pool, const Theory& t) {
    for (const Diagram& d : pool) {
        int h0 = height(d);
        BraidResult res = braid(d, t);
        expect(o, (int)res.sequence.moves.size() == h0, "exactly h(initial) V moves");
        for (auto& m : res.sequence.moves)
            expect(o, m.kind == MoveKind::V && m.sign == +1, "all moves are V+");
        expect(o, height(res.diagram) == 0, "final h = 0");
        if (connected(res.diagram))
            expect(o, smooth(res.diagram).polar_regions.size() == 2,
                   "braided connected diagram has 2 polar regions");
        if (!o.pass) return;
    }
}

static void c5(Outcome& o, const std::vector<Diagram>& pool) {
    for (const Diagram& d : pool) {
        auto s = smooth(d);
        auto coh = coherence(s);
        if (coh.h > 0) {
            expect(o, find_vogel_site(s).has_value(), "h > 0 yields a Vogel site");
        } else {
            auto tree = cycle_tree(s);
            std::map<int, int> deg;
            for (auto [l, r] : tree.edges) deg[l]++, deg[r]++;
            for (auto [z, k] : deg) expect(o, k <= 2, "cycle tree is a chain");
            int n = (int)tree.edges.size();
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    expect(o, tree.coherent_chain(i, j),
                           "chain is coherently oriented");
        }
        if (!o.pass) return;
    }
}

// ------------------------------------------------------------------ 6

static void c6(Outcome& o) {
    std::mt19937 rng(606);
    for (const char* name : {"classical", "virtual"}) {
        Theory t = preset(name);
        for (int i = 0; i < 150; ++i) {
            BraidWord w = randgen::random_word(rng, t, 5, 12);
            Diagram k1 = closure(w, t);
            Diagram k2 = closure(extract_word(k1), t);
            expect(o, canonical_code(k1) == canonical_code(k2),
                   "closure/extract_word round trip");
            auto doc = parse_gkd(emit_gkd(k1, t));
            expect(o, canonical_code(doc.diagram) == canonical_code(k1),
                   "gkd emit/parse round trip");
            expect(o, parse_braid(emit_braid(w)) == w, "braid emit/parse round trip");
            if (!o.pass) return;
        }
    }
}

// ------------------------------------------------------------------ 7

static void check_decompose(Outcome& o, const Diagram& d, const MoveRecord& m,
                            const Theory& t) {
    Diagram direct = apply_move(d, m, t).diagram;
    MoveSequence seq = decompose(d, m, t);
    auto frames = replay_diagrams(seq, t);
    expect(o, is_isomorphic(frames.back(), direct),
           "decomposition reaches the direct result");
    expect(o, replay(seq, t).flagged.empty(),
           "h-changers restricted to V and Markov-family R1");
}

static void c7(Outcome& o, const Theory& t) {
    std::mt19937 rng(707);
    // decompose's bounded searches may reject a locus outright (no output);
    // such instances are skipped, only produced decompositions are judged.
    int r2pp = 0, r1 = 0, attempts = 0;
    while ((r2pp < 200 || r1 < 200) && o.pass && ++attempts < 4000) {
        if (r2pp < 200) {
            Diagram d = randgen::random_diagram(rng, t, 7, 5);
            for (auto& m : applicable_moves(d, t, {true, 120, true})) {
                if (m.kind != MoveKind::R2pp || m.sign != +1) continue;
                try {
                    check_decompose(o, d, m, t);
                    ++r2pp;
                } catch (const MoveError&) {
                }
                break;
            }
        }
        if (r1 < 200) {
            Diagram d = closure(randgen::random_word(rng, t, 4, 7), t);
            SeifertStructure s = smooth(d);
            auto polar = [&](DartRef x) {
                int f = s.regions.face_of(x);
                return std::count(s.polar_regions.begin(), s.polar_regions.end(),
                                  f) > 0;
            };
            for (auto& [eid, e] : d.edges) {
                if (polar(e.head)) continue;
                MoveRecord m{MoveKind::R1, +1, {{'r', true}}, {e.head}, {eid}, 0};
                try {
                    check_decompose(o, d, m, t);
                    ++r1;
                } catch (const MoveError&) {
                }
                break;
            }
        }
    }
    expect(o, r2pp >= 200 && r1 >= 200, "200 instances of each kind");
    std::ostringstream note;
    note << r2pp << " R2'' and " << r1 << " R1 instances in " << attempts
         << " attempts";
    o.detail += (o.detail.empty() ? "" : "; ") + note.str();
}

// ------------------------------------------------------------------ 8

// Success-rate floor documented in README (implemented-case coverage).
static constexpr double kDocumentedCoverage = 0.25;

static void c8(Outcome& o, const Theory& t) {
    std::mt19937 rng(808);
    std::vector<MoveSequence> seqs;
    while ((int)seqs.size() < 200) {
        Diagram K = closure(randgen::random_word(rng, t, 3, 5), t);
        MoveSequence seq{K, {}};
        Diagram cur = K;
        for (int j = 0; j < 6 && (int)seq.moves.size() < 8; ++j) {
            std::vector<MoveRecord> cands;
            for (auto& m : applicable_moves(cur, t, {true, 40, true}))
                if (m.kind != MoveKind::R2pp) cands.push_back(m);
            if (cands.empty()) break;
            auto& m = cands[std::uniform_int_distribution<size_t>(
                0, cands.size() - 1)(rng)];
            try {
                ApplyResult ar = apply_move(cur, m, t);
                if (height(ar.diagram) > 3 || ar.diagram.crossings.size() > 8)
                    continue;
                seq.moves.push_back(ar.applied);
                cur = std::move(ar.diagram);
            } catch (const MoveError&) {
            }
        }
        for (auto& m : braid(cur, t).sequence.moves) seq.moves.push_back(m);
        if (seq.moves.size() > 10) continue;
        seqs.push_back(std::move(seq));
    }

    int threads = std::max(1u, std::thread::hardware_concurrency());
    std::atomic<int> next{0}, ok{0}, unsupported{0}, wrong{0}, vague{0};
    auto work = [&] {
        Theory local = t;
        for (int i; (i = next.fetch_add(1)) < (int)seqs.size();) {
            NormalizeOutcome out = markov_normalize(seqs[i], local, 200);
            if (!out.braided) {
                if (out.failure.empty()) ++vague;
                ++unsupported;
                continue;
            }
            HProfile p = replay(out.sequence, local);
            bool flat = std::all_of(p.values.begin(), p.values.end(),
                                    [](int v) { return v == 0; });
            auto frames = replay_diagrams(out.sequence, local);
            bool ends = is_isomorphic(frames.front(), seqs[i].initial) &&
                        is_isomorphic(frames.back(),
                                      replay_diagrams(seqs[i], local).back());
            (flat && ends ? ok : wrong)++;
        }
    };
    std::vector<std::future<void>> fs;
    for (int i = 0; i < threads; ++i)
        fs.push_back(std::async(std::launch::async, work));
    for (auto& f : fs) f.get();

    expect(o, vague == 0, "unsupported reports carry a reason");
    expect(o, wrong == 0, "no incorrect output");
    double rate = ok / double(seqs.size());
    expect(o, rate >= kDocumentedCoverage, "success rate meets documented coverage");
    std::ostringstream note;
    note << "normalized " << ok << "/" << seqs.size() << " (rate " << rate
         << ", floor " << kDocumentedCoverage << ", unsupported " << unsupported
         << ")";
    o.detail += (o.detail.empty() ? "" : "; ") + note.str();
}

// ------------------------------------------------------------------ 9

static void c9(Outcome& o, const Theory& t) {
    std::mt19937 rng(909);
    int checked = 0;
    while (checked < 1100) {
        Diagram d = randgen::random_diagram(rng, t, 8, 5);
        std::string code = canonical_code(d);
        for (int j = 0; j < 4; ++j, ++checked)
            expect(o, canonical_code(relabel(d, rng)) == code,
                   "code invariant under relabeling");
        if (!d.crossings.empty()) {
            Diagram v = d;
            auto& c = v.crossings.begin()->second;
            c.tag = bar(c.tag);
            v.touch();
            expect(o, canonical_code(v) != code, "code distinguishes tag variants");
        }
        if (!o.pass) return;
    }
}

int main() {
    Theory t = preset("classical");
    criterion(1, "worked example", 1, c1);
    criterion(2, "theory table", 1, c2);
    std::vector<Diagram> pool = corpus(1000);
    criterion(3, "Vogel lemma", 60, [&](Outcome& o) { c3(o, pool, t); });
    criterion(4, "braiding theorem", 60, [&](Outcome& o) { c4(o, pool, t); });
    criterion(5, "site/chain lemma", 60, [&](Outcome& o) { c5(o, pool); });
    criterion(6, "round trips", 30, c6);
    criterion(7, "generator decomposition", 120, [&](Outcome& o) { c7(o, t); });
    criterion(8, "Markov rewriting", 120, [&](Outcome& o) { c8(o, t); });
    criterion(9, "canonical form", 60, [&](Outcome& o) { c9(o, t); });
    return g_failures == 0 ? 0 : 1;
}
