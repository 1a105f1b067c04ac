#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "gkd/braiding.hpp"
#include "gkd/canonical.hpp"
#include "gkd/codecs.hpp"
#include "gkd/markov.hpp"
#include "gkd/seifert.hpp"
#include "gkd/theory.hpp"
#include "json.hpp"

using namespace gkd;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

GkdDocument load_gkd(const std::string& path) { return parse_gkd(read_file(path)); }

// A preset name, or a theory file.
Theory load_theory(const std::string& arg) {
    try {
        return preset(arg);
    } catch (const std::exception&) {
    }
    return parse_theory(read_file(arg));
}

std::string cycle_name(int id) { return "s" + std::to_string(id + 1); }

void report_text(std::ostream& out, const SeifertStructure& s,
                 const CoherenceData& coh, const CycleTree& tree) {
    out << "cycles=" << s.cycles.size() << "\n";
    for (auto& c : s.cycles) {
        out << "  " << cycle_name(c.id) << ":";
        if (c.is_loop) out << " free loop";
        for (int e : c.edges) out << " e" << e;
        out << "\n";
    }
    out << "bridges=" << s.bridges.size() << "\n";
    for (auto& b : s.bridges)
        out << "  " << cycle_name(b.cycle_from) << "->" << cycle_name(b.cycle_to)
            << " at c" << b.crossing << " (" << to_string(b.tag) << ")\n";
    out << "h=" << coh.h << "\n";
    out << "per-cycle:";
    for (size_t i = 0; i < coh.per_cycle.size(); ++i)
        out << " " << cycle_name((int)i) << "=" << coh.per_cycle[i];
    out << "\n";
    out << "polar=[";
    bool first = true;
    for (int c : s.polar_cycles) out << (first ? "" : ",") << cycle_name(c), first = false;
    out << "]\n";
    out << "tree: zones=" << tree.zone_count << "\n";
    for (size_t c = 0; c < tree.edges.size(); ++c)
        out << "  " << cycle_name((int)c) << ": z" << tree.edges[c].first
            << " -> z" << tree.edges[c].second << "\n";
}

json report_json(const SeifertStructure& s, const CoherenceData& coh,
                 const CycleTree& tree) {
    json j;
    j["cycles"] = json::array();
    for (auto& c : s.cycles)
        j["cycles"].push_back({{"id", c.id}, {"edges", c.edges}, {"loop", c.is_loop}});
    j["bridges"] = json::array();
    for (auto& b : s.bridges)
        j["bridges"].push_back({{"from", b.cycle_from},
                                {"to", b.cycle_to},
                                {"crossing", b.crossing},
                                {"tag", to_string(b.tag)}});
    j["h"] = coh.h;
    j["per_cycle"] = coh.per_cycle;
    j["polar"] = std::vector<int>(s.polar_cycles.begin(), s.polar_cycles.end());
    j["tree"]["zones"] = tree.zone_count;
    j["tree"]["edges"] = json::array();
    for (size_t c = 0; c < tree.edges.size(); ++c)
        j["tree"]["edges"].push_back(
            {{"cycle", c}, {"left", tree.edges[c].first}, {"right", tree.edges[c].second}});
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"generalized knot diagrams: validation, Seifert analysis, "
                 "braiding, Markov rewriting"};
    app.require_subcommand(1);

    std::string in_path, in_path2, out_path, move_spec, report_mode = "text";

    auto* validate = app.add_subcommand("validate", "check a diagram file");
    validate->add_option("file", in_path, "gkd file")->required();

    auto* seifert = app.add_subcommand("seifert", "smoothed-cycle report");
    seifert->add_option("file", in_path, "gkd file")->required();
    seifert->add_option("--report", report_mode, "text|structured")
        ->check(CLI::IsMember({"text", "structured"}));

    bool emit_word = false, trace = false;
    auto* braid_cmd = app.add_subcommand("braid", "braid a diagram");
    braid_cmd->add_option("file", in_path, "gkd file")->required();
    braid_cmd->add_option("-o", out_path, "write the braided diagram here");
    braid_cmd->add_flag("--emit-word", emit_word, "print the braid word");
    braid_cmd->add_flag("--trace", trace, "print the move sequence");

    auto* closure_cmd = app.add_subcommand("closure", "close a braid word");
    closure_cmd->add_option("braid", in_path, "braid word or file")->required();
    closure_cmd->add_option("-o", out_path, "write the closure here");
    std::string theory_name = "classical";
    closure_cmd->add_option("--theory", theory_name, "preset name or theory file");

    auto* apply_cmd = app.add_subcommand("apply", "apply one move");
    apply_cmd->add_option("file", in_path, "gkd file")->required();
    apply_cmd->add_option("--move", move_spec, "move line, e.g. \"R1 +1 d:c1.0 t:r\"")
        ->required();

    bool show_log = false;
    auto* markov_cmd = app.add_subcommand("markov", "flatten a move sequence");
    markov_cmd->add_option("file", in_path, "moveseq file")->required();
    markov_cmd->add_flag("--log", show_log, "print one line per rewrite");

    auto* iso_cmd = app.add_subcommand("iso", "compare two diagrams");
    iso_cmd->add_option("a", in_path, "gkd file")->required();
    iso_cmd->add_option("b", in_path2, "gkd file")->required();

    bool do_classify = false;
    auto* theory_cmd = app.add_subcommand("theory", "inspect a theory");
    theory_cmd->add_option("theory", in_path, "preset name or theory file")->required();
    theory_cmd->add_flag("--classify", do_classify, "regular/normal classification");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*validate) {
            auto doc = load_gkd(in_path);
            std::cout << "valid: " << doc.diagram.crossings.size() << " crossings, "
                      << doc.diagram.loops.size() << " free loops, h="
                      << height(doc.diagram) << "\n";
        } else if (*seifert) {
            auto doc = load_gkd(in_path);
            auto s = smooth(doc.diagram);
            auto coh = coherence(s);
            auto tree = cycle_tree(s);
            if (report_mode == "structured")
                std::cout << report_json(s, coh, tree).dump(2) << "\n";
            else
                report_text(std::cout, s, coh, tree);
        } else if (*braid_cmd) {
            auto doc = load_gkd(in_path);
            auto res = braid(doc.diagram, doc.theory);
            if (!out_path.empty())
                write_file(out_path, emit_gkd(res.diagram, doc.theory));
            if (emit_word) std::cout << emit_braid(extract_word(res.diagram));
            if (trace) std::cout << emit_moveseq(res.sequence, doc.theory);
            if (!emit_word && !trace && out_path.empty())
                std::cout << emit_gkd(res.diagram, doc.theory);
            std::cerr << "braided in " << res.sequence.moves.size() << " moves, h="
                      << height(res.diagram) << "\n";
        } else if (*closure_cmd) {
            std::string text = in_path;
            if (std::ifstream probe(in_path); probe) text = read_file(in_path);
            Theory t = load_theory(theory_name);
            Diagram d = closure(parse_braid(text), t);
            std::string out = emit_gkd(d, t);
            if (out_path.empty())
                std::cout << out;
            else
                write_file(out_path, out);
        } else if (*apply_cmd) {
            auto doc = load_gkd(in_path);
            auto ar = apply_move(doc.diagram, parse_move(move_spec), doc.theory);
            std::cout << emit_gkd(ar.diagram, doc.theory);
        } else if (*markov_cmd) {
            auto doc = parse_moveseq(read_file(in_path));
            auto out = markov_normalize(doc.sequence, doc.theory);
            if (show_log)
                for (auto& line : out.log) std::cerr << line << "\n";
            if (!out.braided) {
                std::cerr << "unsupported: " << out.failure << "\n";
                return 1;
            }
            std::cout << emit_moveseq(out.sequence, doc.theory);
            std::cerr << "flattened to " << out.sequence.moves.size() << " moves\n";
        } else if (*iso_cmd) {
            bool same = canonical_code(load_gkd(in_path).diagram) ==
                        canonical_code(load_gkd(in_path2).diagram);
            std::cout << (same ? "isomorphic" : "not isomorphic") << "\n";
            return same ? 0 : 1;
        } else if (*theory_cmd) {
            Theory t = load_theory(in_path);
            if (do_classify) {
                auto c = classify(t);
                std::cout << "theory " << t.name << "\n"
                          << "regular: " << (c.regular ? "yes" : "no") << "\n"
                          << "normal: " << (c.normal ? "yes" : "no") << "\n"
                          << "dominant:";
                for (auto& d : c.dominant) std::cout << ' ' << to_string(d);
                std::cout << "\n";
            } else {
                std::cout << emit_theory(t);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
