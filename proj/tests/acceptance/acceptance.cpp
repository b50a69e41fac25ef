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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "selfcheck/bb84.hpp"
#include "selfcheck/checker.hpp"
#include "selfcheck/decomposer.hpp"
#include "selfcheck/errors.hpp"
#include "selfcheck/gallery.hpp"
#include "selfcheck/linalg.hpp"
#include "selfcheck/serialize.hpp"
#include "selfcheck/source.hpp"

using namespace selfcheck;

namespace {

// Golden constant from the exhaustive diagonal-completion oracle in the unit
// tests: the best choice leaves a deviation of sqrt(2)/8.
const double kDiagonalDStar = std::sqrt(2.0) / 8.0;

const std::vector<std::string> kLemmaIds{"L1",
                                         "L2",
                                         "L2_swapped",
                                         "L3",
                                         "L3_minus_variant",
                                         "L3_swapped",
                                         "L3_minus_variant_swapped",
                                         "L4",
                                         "L4_swapped",
                                         "L7",
                                         "L7_swapped",
                                         "block_actions",
                                         "completion_identity",
                                         "completion_identity_swapped",
                                         "orthogonality"};

struct Result {
    bool pass = true;
    std::string detail;
};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool within_5_sigma(double sampled, double exact, std::uint64_t trials) {
    const double sigma = std::sqrt(exact * (1.0 - exact) / static_cast<double>(trials));
    return std::abs(sampled - exact) <= 5.0 * sigma;
}

double angle(int index) { return index == 1 ? 0.0 : (index == 2 ? -kTheta : kTheta); }

// The 100 sources shared by criteria 3 and 4.
std::vector<Source> extended_suite() {
    std::vector<Source> out;
    Rng rng(2026);
    for (std::size_t k = 0; k < 100; ++k) {
        const std::size_t blocks = 1 + k % 4;
        std::uniform_int_distribution<std::size_t> dim(2 * blocks, 16);
        const BipartiteShape shape{dim(rng), dim(rng)};
        out.push_back(build_random_extended_ideal(blocks, shape, rng, {.equal_magnitudes = k % 5 == 0}));
    }
    return out;
}

Result closed_form_table() {
    const CorrelationTable t = correlation_table(build_ideal_source());
    const double c = std::cos(kTheta);
    const double s = std::sin(kTheta);
    double dev = std::abs(t.at(1, 2, Outcome::plus, Outcome::plus) - c * c / 2.0);
    dev = std::max(dev, std::abs(t.at(1, 2, Outcome::plus, Outcome::minus) - s * s / 2.0));
    // Independent closed form for every entry from the basis angles.
    for (int a = 1; a <= 3; ++a) {
        for (int b = 1; b <= 3; ++b) {
            const double d = angle(a) - angle(b);
            for (Outcome x : kOutcomes) {
                for (Outcome y : kOutcomes) {
                    const double want = x == y ? 0.5 * std::cos(d) * std::cos(d) : 0.5 * std::sin(d) * std::sin(d);
                    dev = std::max(dev, std::abs(t.at(a, b, x, y) - want));
                }
            }
        }
    }
    dev = std::max(dev, max_abs_diff(t, ideal_reference_table()));
    char buf[64];
    std::snprintf(buf, sizeof buf, "max dev %.2e over 36 entries", dev);
    return {dev <= 1e-12, buf};
}

Result conjugate_families() {
    const Source s = build_ideal_source();
    double marginal = 0.0;
    double same = 0.0;
    double cross = 0.0;
    for (int beta : {2, 3}) {
        for (Outcome y : kOutcomes) {
            const CVector projected = s.apply_p(beta, y, s.psi());
            const double mass = projected.norm_squared();
            marginal = std::max(marginal, std::abs(mass - 0.5));
            for (int alpha : {2, 3}) {
                for (Outcome x : kOutcomes) {
                    const double cond = s.apply_r(alpha, x, projected).norm_squared() / mass;
                    if (alpha == beta) {
                        same = std::max(same, std::abs(cond - (x == y ? 1.0 : 0.0)));
                    } else {
                        cross = std::max(cross, std::abs(cond - 0.5));
                    }
                }
            }
        }
    }
    const CheckReport r = check_conjugate(s, 1e-12);
    const bool pass = marginal <= 1e-12 && same <= 1e-12 && cross <= 1e-12 && r.pass;
    char buf[160];
    std::snprintf(buf, sizeof buf, "marginal %.2e, delta %.2e, cross %.2e, checker %.2e", marginal, same, cross,
                  r.max_abs_dev);
    return {pass, buf};
}

Result extended_pass(const std::vector<Source> &suite) {
    int passed = 0;
    double worst = 0.0;
    for (const Source &s : suite) {
        const CheckReport r = check_self_checking(s, 1e-9);
        passed += r.pass ? 1 : 0;
        worst = std::max(worst, r.max_abs_dev);
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d/%zu pass, worst dev %.2e", passed, suite.size(), worst);
    return {passed == static_cast<int>(suite.size()), buf};
}

double block_overlap(const Decomposition &d) {
    double worst = 0.0;
    for (std::size_t i = 0; i < d.blocks.size(); ++i) {
        for (std::size_t j = 0; j < d.blocks.size(); ++j) {
            if (i == j) {
                continue;
            }
            const Block &p = d.blocks[i];
            const Block &q = d.blocks[j];
            for (const CVector *u : {&p.a0, &p.a1}) {
                for (const CVector *v : {&q.a0, &q.a1}) {
                    worst = std::max(worst, std::abs(inner(*u, *v)));
                }
            }
            for (const CVector *u : {&p.b0, &p.b1}) {
                for (const CVector *v : {&q.b0, &q.b1}) {
                    worst = std::max(worst, std::abs(inner(*u, *v)));
                }
            }
        }
    }
    return worst;
}

Result decompositions(const std::vector<Source> &suite) {
    int ok = 0;
    double residual = 0.0;
    double overlap = 0.0;
    double norm_dev = 0.0;
    double lemma = 0.0;
    std::string first_failure;
    for (std::size_t k = 0; k < suite.size(); ++k) {
        try {
            const Decomposition d = decompose(suite[k]);
            double weight = 0.0;
            for (const Block &b : d.blocks) {
                weight += 2.0 * std::norm(b.alpha);
            }
            double worst_lemma = 0.0;
            bool all_present = true;
            for (const std::string &id : kLemmaIds) {
                all_present = all_present && d.diagnostics.has(id);
                if (d.diagnostics.has(id)) {
                    worst_lemma = std::max(worst_lemma, d.diagnostics.deviation(id));
                }
            }
            const double ov = block_overlap(d);
            residual = std::max(residual, d.residual);
            overlap = std::max(overlap, ov);
            norm_dev = std::max(norm_dev, std::abs(weight - 1.0));
            lemma = std::max(lemma, worst_lemma);
            const bool good = d.residual <= 1e-8 && ov <= 1e-8 && std::abs(weight - 1.0) <= 1e-9 &&
                              all_present && worst_lemma <= 1e-8 && d.diagnostics.all_pass();
            ok += good ? 1 : 0;
            if (!good && first_failure.empty()) {
                first_failure = " (first failure: source " + std::to_string(k) + ")";
            }
        } catch (const std::exception &e) {
            if (first_failure.empty()) {
                first_failure = " (source " + std::to_string(k) + " threw: " + e.what() + ")";
            }
        }
    }
    char buf[200];
    std::snprintf(buf, sizeof buf, "%d/%zu ok; residual %.2e, overlap %.2e, weight %.2e, lemma %.2e", ok,
                  suite.size(), residual, overlap, norm_dev, lemma);
    return {ok == static_cast<int>(suite.size()), buf + first_failure};
}

Result classical_counterexample() {
    const Source s = build_classical_source();
    const CheckReport conj = check_conjugate(s);
    const CompletionScan scan = scan_diagonal_completions(s);
    const ExpectedStats exact = exact_stats(s, EveStrategy::classical_clone);
    Rng rng(5);
    const ProtocolStats sampled = run_protocol(s, 10000, EveStrategy::classical_clone, rng).stats;
    const bool pass = conj.pass && conj.max_abs_dev == 0.0 && scan.evaluated == 256 && scan.min_max_abs_dev > 0.0 &&
                      std::abs(scan.min_max_abs_dev - kDiagonalDStar) <= 1e-12 && exact.qber == 0.0 &&
                      exact.eve_information_fraction == 1.0 && sampled.qber == 0.0 &&
                      sampled.eve_information_fraction == 1.0;
    char buf[200];
    std::snprintf(buf, sizeof buf, "conjugate dev %.1e, D* %.10f over %zu completions, clone qber %.1f info %.1f",
                  conj.max_abs_dev, scan.min_max_abs_dev, scan.evaluated, sampled.qber,
                  sampled.eve_information_fraction);
    return {pass, buf};
}

Result bb84_statistics() {
    const Source ideal = build_ideal_source();
    const ExpectedStats none = exact_stats(ideal, EveStrategy::none);
    const ExpectedStats ir = exact_stats(ideal, EveStrategy::intercept_resend);
    int none_ok = 0;
    int ir_ok = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng a(seed);
        none_ok += run_protocol(ideal, 10000, EveStrategy::none, a).stats.qber == 0.0 ? 1 : 0;
        Rng b(seed);
        const ProtocolStats st = run_protocol(ideal, 10000, EveStrategy::intercept_resend, b).stats;
        ir_ok += within_5_sigma(st.qber, 0.25, st.sifted_count) ? 1 : 0;
    }
    const bool pass = none.qber == 0.0 && std::abs(ir.qber - 0.25) <= 1e-12 && none_ok >= 198 && ir_ok >= 198;
    char buf[160];
    std::snprintf(buf, sizeof buf, "no-eve qber 0 in %d/200, intercept-resend within 5 sigma in %d/200", none_ok,
                  ir_ok);
    return {pass, buf};
}

Result perturbation_ladder() {
    const Source base = build_ideal_source();
    bool pass = true;
    std::string detail;
    for (PerturbMode mode : {PerturbMode::state, PerturbMode::measurement}) {
        detail += mode == PerturbMode::state ? "state medians" : "; measurement medians";
        double prev = 0.0;
        for (double eps : {1e-4, 1e-3, 1e-2}) {
            std::vector<double> devs;
            for (std::uint64_t seed = 0; seed < 50; ++seed) {
                Rng rng(seed);
                devs.push_back(check_self_checking(perturb_source(base, eps, mode, rng)).max_abs_dev);
            }
            const double m = median(devs);
            pass = pass && m > prev;
            prev = m;
            char buf[32];
            std::snprintf(buf, sizeof buf, " %.2e", m);
            detail += buf;
        }
        Rng rng(0);
        const Source same = perturb_source(base, 0.0, mode, rng);
        pass = pass && same.psi() == base.psi() && source_to_json(same).dump() == source_to_json(base).dump();
    }
    return {pass, detail + "; epsilon 0 bit-exact"};
}

Result linalg_core() {
    Rng rng(88);
    std::uniform_int_distribution<std::size_t> dim(1, 16);
    std::normal_distribution<double> g(0.0, 1.0);
    double schmidt = 0.0;
    double trace = 0.0;
    double tensor = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const BipartiteShape shape{dim(rng), dim(rng)};
        const CVector v = random_unit_vector(shape.joint_dim(), rng);
        const SchmidtResult r = schmidt_decompose(v, shape);
        CVector recon(shape.joint_dim());
        for (std::size_t i = 0; i < r.coefficients.size(); ++i) {
            recon = recon + cd{r.coefficients[i], 0.0} * tensor_vec(r.left_vectors[i], r.right_vectors[i]);
        }
        schmidt = std::max(schmidt, std::max(r.residual, (v - recon).norm()));

        if (k % 10 == 0) {
            // Random density G G^dagger / tr.
            CMatrix gm(shape.joint_dim(), shape.joint_dim());
            for (std::size_t i = 0; i < gm.rows(); ++i) {
                for (std::size_t j = 0; j < gm.cols(); ++j) {
                    gm(i, j) = {g(rng), g(rng)};
                }
            }
            CMatrix rho = gm * gm.adjoint();
            rho = cd{1.0 / rho.trace().real(), 0.0} * rho;
            for (Factor f : {Factor::a, Factor::b}) {
                trace = std::max(trace, std::abs(partial_trace(rho, shape, f).trace() - rho.trace()));
            }
        }

        const CVector x = cd{1.0 + 3.0 * std::abs(g(rng)), 0.0} * random_unit_vector(shape.dim_a, rng);
        const CVector y = cd{0.5 + std::abs(g(rng)), 0.0} * random_unit_vector(shape.dim_b, rng);
        tensor = std::max(tensor, std::abs(tensor_vec(x, y).norm() - x.norm() * y.norm()));
    }
    const bool pass = schmidt <= 1e-10 && trace <= 1e-12 && tensor <= 1e-12;
    char buf[160];
    std::snprintf(buf, sizeof buf, "schmidt residual %.2e, partial trace %.2e, tensor norm %.2e", schmidt, trace,
                  tensor);
    return {pass, buf};
}

}  // namespace

int main() {
    const std::vector<Source> suite = extended_suite();
    const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
        {"closed-form ideal table", closed_form_table},
        {"conjugate-coding families on the ideal source", conjugate_families},
        {"100 extended ideal sources self-check", [&] { return extended_pass(suite); }},
        {"decomposition of the extended suite", [&] { return decompositions(suite); }},
        {"classical conjugate-coding counterexample", classical_counterexample},
        {"BB84 sampled statistics", bb84_statistics},
        {"perturbation monotonicity", perturbation_ladder},
        {"linear-algebra core", linalg_core},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Result r;
        try {
            r = criteria[i].second();
        } catch (const std::exception &e) {
            r = {false, std::string("threw: ") + e.what()};
        }
        failures += r.pass ? 0 : 1;
        std::printf("%s criterion %zu: %s -- %s\n", r.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    r.detail.c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
