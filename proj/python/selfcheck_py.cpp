// Copyright 2026 The selfcheck Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings. Structured results cross the boundary as JSON text in the
// same schema the CLI writes; the package wrapper decodes them.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "cli.hpp"
#include "selfcheck/bb84.hpp"
#include "selfcheck/checker.hpp"
#include "selfcheck/decomposer.hpp"
#include "selfcheck/errors.hpp"
#include "selfcheck/gallery.hpp"
#include "selfcheck/serialize.hpp"
#include "selfcheck/source.hpp"

namespace py = pybind11;
using namespace selfcheck;

namespace {

std::string dump(const Json &j) { return j.dump(); }

PerturbMode perturb_mode_from(const std::string &name) {
    if (name == "state") {
        return PerturbMode::state;
    }
    if (name == "measurement") {
        return PerturbMode::measurement;
    }
    throw ValidationError("unknown perturbation mode '" + name + "'");
}

std::vector<cd> psi_of(const Source &s) {
    std::vector<cd> out(s.psi().dim());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = s.psi()[i];
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_selfcheck, m) {
    m.doc() = "Self-checking source verification and BB84 simulation";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
    py::register_exception<ContractError>(m, "ContractError", PyExc_RuntimeError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_RuntimeError);
    py::register_exception<StructuralError>(m, "StructuralError", PyExc_RuntimeError);

    py::class_<Source>(m, "Source")
        .def_property_readonly("dim_a", [](const Source &s) { return s.shape().dim_a; })
        .def_property_readonly("dim_b", [](const Source &s) { return s.shape().dim_b; })
        .def_property_readonly("indices", &Source::indices)
        .def_property_readonly("psi", &psi_of)
        .def("swapped", &Source::swapped)
        .def("to_json", [](const Source &s) { return dump(source_to_json(s)); })
        .def_static("from_json", [](const std::string &text) { return source_from_json(parse_json_text(text)); })
        .def("__repr__", [](const Source &s) {
            std::ostringstream os;
            os << "<Source dims=(" << s.shape().dim_a << ", " << s.shape().dim_b << ") indices=" << s.indices().size()
               << ">";
            return os.str();
        });

    m.def("build_ideal_source", &build_ideal_source);
    m.def("build_classical_source", &build_classical_source);
    m.def(
        "build_random_extended_ideal",
        [](std::size_t blocks, std::size_t dim_a, std::size_t dim_b, std::uint64_t seed, bool equal_magnitudes) {
            Rng rng(seed);
            return build_random_extended_ideal(blocks, {dim_a, dim_b}, rng, {.equal_magnitudes = equal_magnitudes});
        },
        py::arg("blocks"), py::arg("dim_a"), py::arg("dim_b"), py::arg("seed") = 0, py::arg("equal_magnitudes") = false);
    m.def(
        "perturb_source",
        [](const Source &s, double epsilon, const std::string &mode, std::uint64_t seed) {
            Rng rng(seed);
            return perturb_source(s, epsilon, perturb_mode_from(mode), rng);
        },
        py::arg("source"), py::arg("epsilon"), py::arg("mode") = "measurement", py::arg("seed") = 0);
    m.def("load_source", [](const std::string &path) { return load_source(path); });

    m.def("correlation_table_json", [](const Source &s) { return dump(table_to_json(correlation_table(s))); });
    m.def("ideal_reference_table_json", [] { return dump(table_to_json(ideal_reference_table())); });

    m.def(
        "check_conjugate_json", [](const Source &s, double tol) { return dump(report_to_json(check_conjugate(s, tol))); },
        py::arg("source"), py::arg("tol") = kDefaultExactTol);
    m.def(
        "check_self_checking_json",
        [](const Source &s, double tol) { return dump(report_to_json(check_self_checking(s, tol))); },
        py::arg("source"), py::arg("tol") = kDefaultExactTol);
    m.def(
        "empirical_check_json",
        [](const Source &s, std::uint64_t n, std::uint64_t seed, double eps) {
            return dump(report_to_json(empirical_check(s, n, seed, eps)));
        },
        py::arg("source"), py::arg("n_samples"), py::arg("seed") = 0, py::arg("eps") = 0.01);

    m.def(
        "decompose_json",
        [](const Source &s, double tol, double lemma_tol) {
            DecomposeOptions o;
            o.tol = tol;
            o.lemma_tol = lemma_tol;
            return dump(decomposition_to_json(decompose(s, o)));
        },
        py::arg("source"), py::arg("tol") = kDefaultExactTol, py::arg("lemma_tol") = kDefaultLemmaTol);
    m.def(
        "diagnose_json",
        [](const Source &s, double lemma_tol) {
            DecomposeOptions o;
            o.lemma_tol = lemma_tol;
            return dump(lemmas_to_json(diagnose(s, o)));
        },
        py::arg("source"), py::arg("lemma_tol") = kDefaultLemmaTol);

    m.def(
        "bb84_json",
        [](const Source &s, std::uint64_t n, const std::string &eve, std::uint64_t seed) {
            const EveStrategy strategy = eve_strategy_from_string(eve);
            Rng rng(seed);
            return dump(stats_to_json(run_protocol(s, n, strategy, rng).stats, strategy, seed));
        },
        py::arg("source"), py::arg("n"), py::arg("eve") = "none", py::arg("seed") = 0);
    m.def(
        "bb84_exact_json",
        [](const Source &s, const std::string &eve) {
            const EveStrategy strategy = eve_strategy_from_string(eve);
            return dump(expected_stats_to_json(exact_stats(s, strategy), strategy));
        },
        py::arg("source"), py::arg("eve") = "none");

    m.def("gallery", [] {
        std::vector<std::tuple<std::string, Source, std::string>> out;
        for (const GalleryEntry &e : gallery()) {
            out.emplace_back(e.name, e.source, dump(manifest_entry_to_json(e, e.name + ".json")));
        }
        return out;
    });

    m.def(
        "run_cli",
        [](const std::vector<std::string> &args) {
            std::ostringstream out;
            std::ostringstream err;
            const int code = cli::dispatch(args, out, err);
            return std::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
