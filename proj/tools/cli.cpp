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

#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "selfcheck/bb84.hpp"
#include "selfcheck/checker.hpp"
#include "selfcheck/decomposer.hpp"
#include "selfcheck/errors.hpp"
#include "selfcheck/gallery.hpp"
#include "selfcheck/serialize.hpp"
#include "selfcheck/source.hpp"

namespace selfcheck::cli {

namespace {

constexpr double kDefaultEmpiricalEps = 0.01;

/// Subcommand failed its test; the message still goes to the error stream.
class TestFailure : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string out;
    std::string input;
    std::string mode;
    std::string eve = "none";
    std::string format = "json";
    std::string out_dir;
    double tol = -1.0;
    double lemma_tol = kDefaultLemmaTol;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t samples = 10000;
    std::uint64_t n = 10000;
    std::size_t blocks = 1;
    std::vector<std::size_t> dims;
    bool degenerate = false;
    bool exact = false;
    bool diagnose = false;
};

double default_tol() {
    const char *env = std::getenv(kTolEnv);
    if (env == nullptr || *env == '\0') {
        return kDefaultExactTol;
    }
    char *end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0)) {
        throw ValidationError(std::string(kTolEnv) + " must be a positive number, got '" + env + "'");
    }
    return v;
}

double resolved_tol(const Options &o) { return o.tol > 0.0 ? o.tol : default_tol(); }

void emit_text(const Options &o, const std::string &text, std::ostream &out) {
    if (o.out.empty()) {
        out << text;
    } else {
        write_file_atomic(o.out, text);
    }
}

void emit_json(const Options &o, const Json &j, std::ostream &out) { emit_text(o, j.dump(2) + "\n", out); }

Json base_config(const std::string &command, const Options &o) {
    Json c;
    c["command"] = command;
    if (!o.input.empty()) {
        c["input"] = o.input;
    }
    c["output"] = o.out.empty() ? Json(nullptr) : Json(o.out);
    return c;
}

Json with_config(Json config, const Json &body) {
    Json j;
    j["config"] = std::move(config);
    for (const auto &[key, value] : body.items()) {
        j[key] = value;
    }
    return j;
}

PerturbMode perturb_mode(const std::string &name) {
    if (name == "state") {
        return PerturbMode::state;
    }
    return PerturbMode::measurement;
}

int run_gen_ideal(const Options &o, std::ostream &out) {
    emit_json(o, with_config(base_config("gen-ideal", o), source_to_json(build_ideal_source())), out);
    return kExitOk;
}

int run_gen_classical(const Options &o, std::ostream &out) {
    emit_json(o, with_config(base_config("gen-classical", o), source_to_json(build_classical_source())), out);
    return kExitOk;
}

int run_gen_extended(const Options &o, std::ostream &out) {
    BipartiteShape shape{2 * o.blocks, 2 * o.blocks};
    if (o.dims.size() == 1) {
        shape = {o.dims[0], o.dims[0]};
    } else if (o.dims.size() == 2) {
        shape = {o.dims[0], o.dims[1]};
    }
    Rng rng(o.seed);
    ExtendedIdealOptions opts;
    opts.equal_magnitudes = o.degenerate;
    const Source s = build_random_extended_ideal(o.blocks, shape, rng, opts);
    Json c = base_config("gen-extended", o);
    c["blocks"] = o.blocks;
    c["dims"] = {shape.dim_a, shape.dim_b};
    c["seed"] = o.seed;
    c["degenerate"] = o.degenerate;
    emit_json(o, with_config(std::move(c), source_to_json(s)), out);
    return kExitOk;
}

int run_perturb(const Options &o, std::ostream &out) {
    const Source s = load_source(o.input);
    Rng rng(o.seed);
    const Source p = perturb_source(s, o.epsilon, perturb_mode(o.mode), rng);
    Json c = base_config("perturb", o);
    c["epsilon"] = o.epsilon;
    c["mode"] = o.mode;
    c["seed"] = o.seed;
    emit_json(o, with_config(std::move(c), source_to_json(p)), out);
    return kExitOk;
}

int run_check(const Options &o, std::ostream &out) {
    const Source s = load_source(o.input);
    Json c = base_config("check", o);
    c["mode"] = o.mode;
    CheckReport report;
    if (o.mode == "empirical") {
        const double eps = o.tol > 0.0 ? o.tol : kDefaultEmpiricalEps;
        c["tol"] = eps;
        c["samples"] = o.samples;
        c["seed"] = o.seed;
        report = empirical_check(s, o.samples, o.seed, eps);
    } else {
        const double tol = resolved_tol(o);
        c["tol"] = tol;
        report = o.mode == "self" ? check_self_checking(s, tol) : check_conjugate(s, tol);
    }
    emit_json(o, with_config(std::move(c), report_to_json(report)), out);
    if (!report.pass) {
        throw TestFailure(o.mode + " check failed: max deviation " + std::to_string(report.max_abs_dev) +
                          " exceeds " + std::to_string(report.tolerance));
    }
    return kExitOk;
}

int run_decompose(const Options &o, std::ostream &out) {
    const Source s = load_source(o.input);
    DecomposeOptions opts;
    opts.tol = resolved_tol(o);
    opts.lemma_tol = o.lemma_tol;
    Json c = base_config("decompose", o);
    c["tol"] = opts.tol;
    c["lemma_tol"] = opts.lemma_tol;
    c["diagnose"] = o.diagnose;

    if (o.diagnose) {
        const LemmaReport lemmas = diagnose(s, opts);
        Json body;
        body["lemma_tolerance"] = lemmas.tolerance();
        body["lemmas"] = lemmas_to_json(lemmas);
        body["verdict"] = lemmas.all_pass() ? "pass" : "fail";
        emit_json(o, with_config(std::move(c), body), out);
        if (!lemmas.all_pass()) {
            throw TestFailure("diagnosis found identities above the lemma tolerance");
        }
        return kExitOk;
    }
    try {
        const Decomposition d = decompose(s, opts);
        emit_json(o, with_config(std::move(c), decomposition_to_json(d)), out);
        if (!d.diagnostics.all_pass()) {
            throw TestFailure("decomposition found identities above the lemma tolerance");
        }
    } catch (const PreconditionError &e) {
        throw TestFailure(std::string("source is not self-checking: max deviation ") +
                          std::to_string(e.report().max_abs_dev));
    } catch (const StructuralError &e) {
        throw TestFailure(std::string("structural failure: ") + e.what());
    }
    return kExitOk;
}

int run_bb84(const Options &o, std::ostream &out) {
    const Source s = o.input.empty() ? build_ideal_source() : load_source(o.input);
    const EveStrategy eve = eve_strategy_from_string(o.eve);
    Json c = base_config("bb84", o);
    c["eve"] = o.eve;
    c["exact"] = o.exact;
    if (o.exact) {
        if (o.format == "csv") {
            throw ValidationError("--format csv needs sampled records; drop --exact");
        }
        emit_json(o, with_config(std::move(c), expected_stats_to_json(exact_stats(s, eve), eve)), out);
        return kExitOk;
    }
    c["n"] = o.n;
    c["seed"] = o.seed;
    c["format"] = o.format;
    Rng rng(o.seed);
    const ProtocolRun run = run_protocol(s, o.n, eve, rng);
    if (o.format == "csv") {
        emit_text(o, records_to_csv(run.records), out);
    } else {
        emit_json(o, with_config(std::move(c), stats_to_json(run.stats, eve, o.seed)), out);
    }
    return kExitOk;
}

int run_table(const Options &o, std::ostream &out) {
    const Source s = load_source(o.input);
    emit_json(o, with_config(base_config("table", o), table_to_json(correlation_table(s))), out);
    return kExitOk;
}

int run_gallery(const Options &o, std::ostream &out) {
    Json c = base_config("gallery", o);
    c["out_dir"] = o.out_dir.empty() ? Json(nullptr) : Json(o.out_dir);
    if (!o.out_dir.empty()) {
        std::filesystem::create_directories(o.out_dir);
    }
    Json manifest = Json::array();
    Json entries = Json::array();
    bool all_match = true;
    for (const GalleryEntry &entry : gallery()) {
        const std::string file = entry.name + ".json";
        if (!o.out_dir.empty()) {
            write_file_atomic(std::filesystem::path(o.out_dir) / file, source_to_json(entry.source).dump(2) + "\n");
        }
        manifest.push_back(manifest_entry_to_json(entry, file));
        const auto observed = observed_verdicts(entry.source);
        const bool match = observed == entry.expected;
        all_match = all_match && match;
        Json row;
        row["name"] = entry.name;
        Json exp = Json::object();
        Json obs = Json::object();
        for (const auto &[test, v] : entry.expected) {
            exp[test] = to_string(v);
        }
        for (const auto &[test, v] : observed) {
            obs[test] = to_string(v);
        }
        row["expected"] = std::move(exp);
        row["observed"] = std::move(obs);
        row["match"] = match;
        entries.push_back(std::move(row));
    }
    if (!o.out_dir.empty()) {
        write_file_atomic(std::filesystem::path(o.out_dir) / "manifest.json", manifest.dump(2) + "\n");
    }
    Json body;
    body["entries"] = std::move(entries);
    body["all_match"] = all_match;
    emit_json(o, with_config(std::move(c), body), out);
    if (!all_match) {
        throw TestFailure("gallery verdicts differ from the expected corpus verdicts");
    }
    return kExitOk;
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

}  // namespace

int dispatch(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    Options o;
    CLI::App app{"selfcheck: conformance testing of self-checking quantum sources"};
    app.name("selfcheck");
    app.require_subcommand(1);
    app.footer(std::string("Environment:\n  ") + kTolEnv +
               "  overrides the default exact-mode tolerance (1e-9) used by check and decompose when --tol is "
               "not given.\n\nExit codes: 0 pass, 1 test failed, 2 usage or input error.");

    auto add_out = [&](CLI::App *sub) { sub->add_option("-o,--out", o.out, "Output file (default: stdout)"); };
    auto add_input = [&](CLI::App *sub) {
        sub->add_option("source", o.input, "Source JSON file")->required()->check(CLI::ExistingFile);
    };

    CLI::App *gen_ideal = app.add_subcommand("gen-ideal", "Write the ideal source");
    add_out(gen_ideal);

    CLI::App *gen_classical = app.add_subcommand("gen-classical", "Write the classical hidden-variable source");
    add_out(gen_classical);

    CLI::App *gen_extended = app.add_subcommand("gen-extended", "Write a random extended ideal source");
    add_out(gen_extended);
    gen_extended->add_option("--blocks", o.blocks, "Number of EPR blocks")->check(CLI::PositiveNumber);
    gen_extended->add_option("--dims", o.dims, "Factor dimensions: one value (square) or two (dim_a dim_b)")
        ->expected(1, 2);
    gen_extended->add_option("--seed", o.seed, "RNG seed (default 0)");
    gen_extended->add_flag("--degenerate", o.degenerate, "Give every block the same |alpha|");

    CLI::App *perturb = app.add_subcommand("perturb", "Perturb a source");
    add_input(perturb);
    add_out(perturb);
    perturb->add_option("--epsilon", o.epsilon, "Perturbation size")->required()->check(CLI::NonNegativeNumber);
    o.mode = "measurement";
    perturb->add_option("--mode", o.mode, "state | measurement (default measurement)")
        ->check(CLI::IsMember({"state", "measurement"}));
    perturb->add_option("--seed", o.seed, "RNG seed (default 0)");

    CLI::App *check = app.add_subcommand("check", "Test a source against the ideal specification");
    add_input(check);
    add_out(check);
    check->add_option("--mode", o.mode, "conjugate | self | empirical")
        ->required()
        ->check(CLI::IsMember({"conjugate", "self", "empirical"}));
    check->add_option("--tol", o.tol, "Tolerance (default 1e-9 exact, 0.01 empirical)")->check(CLI::PositiveNumber);
    check->add_option("--samples", o.samples, "Rounds per (alpha, beta) pair in empirical mode")
        ->check(CLI::PositiveNumber);
    check->add_option("--seed", o.seed, "RNG seed for empirical mode (default 0)");

    CLI::App *decomp = app.add_subcommand("decompose", "Extract the EPR-block decomposition");
    add_input(decomp);
    add_out(decomp);
    decomp->add_option("--tol", o.tol, "Self-checking precondition tolerance (default 1e-9)")
        ->check(CLI::PositiveNumber);
    decomp->add_option("--lemma-tol", o.lemma_tol, "Lemma verification tolerance (default 1e-8)")
        ->check(CLI::PositiveNumber);
    decomp->add_flag("--diagnose", o.diagnose, "Report every identity without enforcing the precondition");

    CLI::App *bb84 = app.add_subcommand("bb84", "Simulate BB84 transmission and sifting");
    bb84->add_option("source", o.input, "Source JSON file (default: ideal source)")->check(CLI::ExistingFile);
    add_out(bb84);
    bb84->add_option("--n", o.n, "Number of photons");
    bb84->add_option("--eve", o.eve, "none | intercept-resend | classical-clone")
        ->check(CLI::IsMember({"none", "intercept-resend", "classical-clone"}));
    bb84->add_option("--seed", o.seed, "RNG seed (default 0)");
    bb84->add_flag("--exact", o.exact, "Exact expected statistics instead of sampling");
    bb84->add_option("--format", o.format, "json (stats) | csv (per-round records)")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI::App *table = app.add_subcommand("table", "Print the correlation table of a source");
    add_input(table);
    add_out(table);

    CLI::App *gal = app.add_subcommand("gallery", "Run the regression corpus against its expected verdicts");
    add_out(gal);
    gal->add_option("--out-dir", o.out_dir, "Also write every source and manifest.json here");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e, out, err);
        }
        err << "selfcheck: " << one_line(e.what()) << "\n";
        return kExitUsage;
    }

    try {
        if (gen_ideal->parsed()) {
            return run_gen_ideal(o, out);
        }
        if (gen_classical->parsed()) {
            return run_gen_classical(o, out);
        }
        if (gen_extended->parsed()) {
            return run_gen_extended(o, out);
        }
        if (perturb->parsed()) {
            return run_perturb(o, out);
        }
        if (check->parsed()) {
            return run_check(o, out);
        }
        if (decomp->parsed()) {
            return run_decompose(o, out);
        }
        if (bb84->parsed()) {
            return run_bb84(o, out);
        }
        if (table->parsed()) {
            return run_table(o, out);
        }
        return run_gallery(o, out);
    } catch (const TestFailure &e) {
        err << "selfcheck: " << one_line(e.what()) << "\n";
        return kExitFail;
    } catch (const std::exception &e) {
        err << "selfcheck: " << one_line(e.what()) << "\n";
        return kExitUsage;
    }
}

}  // namespace selfcheck::cli
