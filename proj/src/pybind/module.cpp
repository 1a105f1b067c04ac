#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gkd/braiding.hpp"
#include "gkd/canonical.hpp"
#include "gkd/codecs.hpp"
#include "gkd/markov.hpp"
#include "gkd/seifert.hpp"
#include "gkd/theory.hpp"

namespace py = pybind11;
using namespace gkd;

PYBIND11_MODULE(_core, m) {
    m.doc() = "generalized knot diagrams: Seifert analysis, braiding, Markov "
              "rewriting";

    py::register_exception<DiagramError>(m, "DiagramError");
    py::register_exception<MoveError>(m, "MoveError");
    py::register_exception<BraidError>(m, "BraidError");
    py::register_exception<MarkovError>(m, "MarkovError");
    py::register_exception<CodecError>(m, "CodecError");

    py::class_<Theory>(m, "Theory")
        .def_property_readonly("name", [](const Theory& t) { return t.name; })
        .def("__str__", [](const Theory& t) { return emit_theory(t); })
        .def("__repr__",
             [](const Theory& t) { return "<Theory '" + t.name + "'>"; });

    py::class_<Diagram>(m, "Diagram")
        .def_property_readonly(
            "crossings", [](const Diagram& d) { return d.crossings.size(); })
        .def_property_readonly(
            "free_loops", [](const Diagram& d) { return d.loops.size(); })
        .def("__repr__", [](const Diagram& d) {
            return "<Diagram " + std::to_string(d.crossings.size()) +
                   " crossings, " + std::to_string(d.loops.size()) + " loops>";
        });

    m.def("preset", &preset, py::arg("name"), "built-in theory by name");
    m.def("parse_theory", &parse_theory);
    m.def("emit_theory", &emit_theory);
    m.def("classify", [](const Theory& t) {
        auto c = classify(t);
        py::dict d;
        d["regular"] = c.regular;
        d["normal"] = c.normal;
        py::list dom;
        for (auto& x : c.dominant) dom.append(to_string(x));
        d["dominant"] = dom;
        return d;
    });

    m.def("parse_gkd", [](const std::string& text) {
        auto doc = parse_gkd(text);
        return py::make_tuple(doc.theory, doc.diagram);
    }, "parse a gkd file; returns (theory, diagram)");
    m.def("emit_gkd", &emit_gkd, py::arg("diagram"), py::arg("theory"));

    m.def("height", &height, "number of incoherent Seifert cycle pairs");
    m.def("canonical_code", &canonical_code);
    m.def("is_isomorphic", &is_isomorphic);

    m.def("seifert_report", [](const Diagram& dia) {
        auto s = smooth(dia);
        auto coh = coherence(s);
        py::dict d;
        py::list cycles;
        for (auto& c : s.cycles) {
            py::dict cd;
            cd["id"] = c.id;
            cd["edges"] = c.edges;
            cd["loop"] = c.is_loop;
            cycles.append(cd);
        }
        d["cycles"] = cycles;
        py::list bridges;
        for (auto& b : s.bridges) {
            py::dict bd;
            bd["from"] = b.cycle_from;
            bd["to"] = b.cycle_to;
            bd["crossing"] = b.crossing;
            bd["tag"] = to_string(b.tag);
            bridges.append(bd);
        }
        d["bridges"] = bridges;
        d["h"] = coh.h;
        d["per_cycle"] = coh.per_cycle;
        d["polar"] = std::vector<int>(s.polar_cycles.begin(), s.polar_cycles.end());
        return d;
    });

    m.def("closure", [](const std::string& word, const Theory& t) {
        return closure(parse_braid(word), t);
    }, py::arg("word"), py::arg("theory"), "close a braid word");
    m.def("extract_word", [](const Diagram& d) {
        return emit_braid(extract_word(d));
    }, "braid word of a braided diagram");
    m.def("braid_diagram", [](const Diagram& d, const Theory& t) {
        auto r = braid(d, t);
        return py::make_tuple(r.diagram, emit_moveseq(r.sequence, t));
    }, py::arg("diagram"), py::arg("theory"),
       "Vogel braiding; returns (braided diagram, move-sequence text)");

    m.def("apply_move", [](const Diagram& d, const std::string& spec,
                           const Theory& t) {
        return apply_move(d, parse_move(spec), t).diagram;
    }, py::arg("diagram"), py::arg("move"), py::arg("theory"));

    m.def("markov_normalize", [](const std::string& moveseq, int budget) {
        auto doc = parse_moveseq(moveseq);
        auto out = markov_normalize(doc.sequence, doc.theory, budget);
        py::dict d;
        d["braided"] = out.braided;
        d["sequence"] = emit_moveseq(out.sequence, doc.theory);
        d["log"] = out.log;
        d["failure"] = out.failure;
        return d;
    }, py::arg("moveseq"), py::arg("budget") = 500,
       "flatten a move sequence between braided endpoints");
}
