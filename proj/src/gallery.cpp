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

#include "selfcheck/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "selfcheck/checker.hpp"
#include "selfcheck/errors.hpp"

namespace selfcheck {

namespace {

// exp(t K) for anti-Hermitian K, through the eigenbasis of the Hermitian iK.
CMatrix unitary_exp(const CMatrix &k, double t) {
    const CMatrix h = cd{0.0, 1.0} * k;
    const EigenResult eig = hermitian_eigen(h);
    std::vector<cd> phases(eig.values.size());
    for (std::size_t i = 0; i < phases.size(); ++i) {
        phases[i] = std::exp(cd{0.0, -t * eig.values[i]});
    }
    return eig.vectors * CMatrix::diagonal(phases) * eig.vectors.adjoint();
}

CMatrix random_real_antisymmetric(std::size_t dim, Rng &rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    CMatrix k(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = i + 1; j < dim; ++j) {
            const double g = gauss(rng);
            k(i, j) = g;
            k(j, i) = -g;
        }
    }
    const double n = operator_norm(k);
    return n > 0.0 ? (1.0 / n) * k : k;
}

CMatrix random_anti_hermitian(std::size_t dim, Rng &rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    CMatrix g(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            g(i, j) = cd{re, im};
        }
    }
    CMatrix k = 0.5 * (g - g.adjoint());
    const double n = operator_norm(k);
    return n > 0.0 ? (1.0 / n) * k : k;
}

Projector conjugated(const Projector &p, const CMatrix &u) {
    CMatrix m = u * p.matrix() * u.adjoint();
    // Restore exact Hermiticity lost to rounding.
    m = 0.5 * (m + m.adjoint());
    return Projector(std::move(m));
}

MeasurementFamily rotate_family(const MeasurementFamily &fam, double epsilon, Rng &rng) {
    std::uniform_real_distribution<double> angle(-epsilon, epsilon);
    std::array<std::optional<ProjectorPair>, 3> pairs;
    for (int index : kAllIndices) {
        if (!fam.has(index)) {
            continue;
        }
        const double t = angle(rng);
        const CMatrix u = unitary_exp(random_real_antisymmetric(fam.dim(), rng), t);
        const ProjectorPair &pp = fam.pair(index);
        pairs[index - 1] = ProjectorPair{conjugated(pp.plus, u), conjugated(pp.minus, u)};
    }
    return MeasurementFamily(fam.dim(), std::move(pairs));
}

Projector diagonal_projector(std::size_t dim, std::uint32_t mask) {
    std::vector<cd> diag(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        diag[i] = (mask >> i) & 1U ? 1.0 : 0.0;
    }
    return Projector(CMatrix::diagonal(diag));
}

Projector leading_columns_projector(const CMatrix &u, std::size_t rank) {
    CMatrix m(u.rows(), u.rows());
    for (std::size_t j = 0; j < rank; ++j) {
        const CVector c = u.column(j);
        m += CMatrix::outer(c, c);
    }
    m = 0.5 * (m + m.adjoint());
    return Projector(std::move(m));
}

double completion_score(const Source &conjugate, const Projector &p1, const Projector &r1) {
    return check_self_checking(complete_with_index1(conjugate, p1, r1)).max_abs_dev;
}

}  // namespace

Source build_classical_source() {
    constexpr std::size_t dim = 4;
    CVector psi(dim * dim);
    for (std::size_t lambda = 0; lambda < dim; ++lambda) {
        psi[lambda * dim + lambda] = 0.5;
    }
    // measurement 2 reads lambda_1 (high bit), measurement 3 reads lambda_2 (low bit)
    auto bit_projector = [](int which, int value) {
        std::vector<cd> diag(dim);
        for (std::size_t lambda = 0; lambda < dim; ++lambda) {
            const int l1 = static_cast<int>(lambda >> 1);
            const int l2 = static_cast<int>(lambda & 1U);
            diag[lambda] = (which == 2 ? l1 : l2) == value ? 1.0 : 0.0;
        }
        return Projector(CMatrix::diagonal(diag));
    };
    std::array<std::optional<ProjectorPair>, 3> pairs;
    for (int index : {2, 3}) {
        pairs[index - 1] = ProjectorPair{bit_projector(index, 0), bit_projector(index, 1)};
    }
    MeasurementFamily family(dim, pairs);
    return Source({dim, dim}, std::move(psi), family, family);
}

Source build_random_extended_ideal(std::size_t num_blocks, BipartiteShape dims, Rng &rng,
                                   ExtendedIdealOptions options) {
    if (num_blocks == 0) {
        throw ValidationError("extended ideal: need at least one block");
    }
    if (dims.dim_a < 2 * num_blocks || dims.dim_b < 2 * num_blocks) {
        throw ValidationError("extended ideal: dims (" + std::to_string(dims.dim_a) + "," +
                              std::to_string(dims.dim_b) + ") cannot hold " + std::to_string(num_blocks) +
                              " orthogonal two-dimensional blocks");
    }
    const CMatrix ua = random_unitary(dims.dim_a, rng);
    const CMatrix ub = random_unitary(dims.dim_b, rng);

    std::uniform_real_distribution<double> magnitude(0.2, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::vector<double> mags(num_blocks, 1.0);
    if (!options.equal_magnitudes) {
        for (double &m : mags) {
            m = magnitude(rng);
        }
    }
    double weight = 0.0;
    for (double m : mags) {
        weight += 2.0 * m * m;
    }
    const double scale = 1.0 / std::sqrt(weight);

    std::vector<ExtendedBlock> blocks;
    for (std::size_t i = 0; i < num_blocks; ++i) {
        const std::array<CVector, 2> ca{ua.column(2 * i), ua.column(2 * i + 1)};
        const std::array<CVector, 2> cb{ub.column(2 * i), ub.column(2 * i + 1)};
        blocks.push_back(ExtendedBlock{std::polar(mags[i] * scale, phase(rng)), CMatrix::from_columns(ca),
                                       CMatrix::from_columns(cb)});
    }
    return build_extended_ideal(blocks, dims);
}

Source perturb_source(const Source &s, double epsilon, PerturbMode mode, Rng &rng) {
    if (epsilon < 0.0) {
        throw ValidationError("perturb_source: epsilon must be non-negative");
    }
    if (epsilon == 0.0) {
        return s;
    }
    if (mode == PerturbMode::state) {
        const CVector noise = random_unit_vector(s.psi().dim(), rng);
        return s.with_psi((s.psi() + epsilon * noise).normalized());
    }
    MeasurementFamily p = rotate_family(s.p_family(), epsilon, rng);
    MeasurementFamily r = rotate_family(s.r_family(), epsilon, rng);
    return Source(s.shape(), s.psi(), std::move(p), std::move(r));
}

Source complete_with_index1(const Source &conjugate, const Projector &p1_plus, const Projector &r1_plus) {
    return Source(conjugate.shape(), conjugate.psi(), conjugate.p_family().with(1, complementary_pair(p1_plus)),
                  conjugate.r_family().with(1, complementary_pair(r1_plus)));
}

CompletionScan scan_diagonal_completions(const Source &conjugate) {
    const BipartiteShape shape = conjugate.shape();
    if (shape.dim_a > 8 || shape.dim_b > 8) {
        throw ShapeError("diagonal completion scan is limited to dims <= 8");
    }
    CompletionScan scan;
    scan.min_max_abs_dev = std::numeric_limits<double>::infinity();
    const std::uint32_t na = 1U << shape.dim_a;
    const std::uint32_t nb = 1U << shape.dim_b;
    for (std::uint32_t pm = 0; pm < na; ++pm) {
        const Projector p1 = diagonal_projector(shape.dim_a, pm);
        for (std::uint32_t rm = 0; rm < nb; ++rm) {
            const double dev = completion_score(conjugate, p1, diagonal_projector(shape.dim_b, rm));
            ++scan.evaluated;
            if (dev < scan.min_max_abs_dev) {
                scan.min_max_abs_dev = dev;
                scan.best_p_mask = pm;
                scan.best_r_mask = rm;
            }
        }
    }
    return scan;
}

CompletionSearch search_completions(const Source &conjugate, std::size_t restarts, std::size_t refine_steps,
                                    Rng &rng) {
    const BipartiteShape shape = conjugate.shape();
    CompletionSearch result;
    result.best_max_abs_dev = std::numeric_limits<double>::infinity();
    std::uniform_int_distribution<std::size_t> rank_a(1, shape.dim_a - 1);
    std::uniform_int_distribution<std::size_t> rank_b(1, shape.dim_b - 1);

    for (std::size_t restart = 0; restart < restarts; ++restart) {
        CMatrix ua = random_unitary(shape.dim_a, rng);
        CMatrix ub = random_unitary(shape.dim_b, rng);
        const std::size_t ka = rank_a(rng);
        const std::size_t kb = rank_b(rng);
        double best = completion_score(conjugate, leading_columns_projector(ua, ka), leading_columns_projector(ub, kb));
        ++result.evaluations;
        double step = 0.5;
        for (std::size_t it = 0; it < refine_steps && step > 1e-6; ++it) {
            const CMatrix ta = unitary_exp(random_anti_hermitian(shape.dim_a, rng), step) * ua;
            const CMatrix tb = unitary_exp(random_anti_hermitian(shape.dim_b, rng), step) * ub;
            const double score =
                completion_score(conjugate, leading_columns_projector(ta, ka), leading_columns_projector(tb, kb));
            ++result.evaluations;
            if (score < best) {
                best = score;
                ua = ta;
                ub = tb;
            } else {
                step *= 0.97;
            }
        }
        result.best_max_abs_dev = std::min(result.best_max_abs_dev, best);
    }
    return result;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass:
            return "pass";
        case Verdict::fail:
            return "fail";
        default:
            return "n/a";
    }
}

std::map<std::string, Verdict> observed_verdicts(const Source &s) {
    std::map<std::string, Verdict> out;
    out["conjugate"] = check_conjugate(s).pass ? Verdict::pass : Verdict::fail;
    if (s.kind() == SourceKind::self_checking_candidate) {
        out["self_checking"] = check_self_checking(s).pass ? Verdict::pass : Verdict::fail;
    } else {
        out["self_checking"] = Verdict::not_applicable;
    }
    return out;
}

std::vector<GalleryEntry> gallery() {
    std::vector<GalleryEntry> entries;
    const auto both = [](Verdict conj, Verdict self) {
        return std::map<std::string, Verdict>{{"conjugate", conj}, {"self_checking", self}};
    };

    entries.push_back({"ideal", build_ideal_source(), both(Verdict::pass, Verdict::pass), std::nullopt,
                       "Bell state with bases at 0, -pi/8, +pi/8 on both factors"});

    {
        Rng rng(2);
        entries.push_back({"extended-2", build_random_extended_ideal(2, {4, 4}, rng),
                           both(Verdict::pass, Verdict::pass), 2, "two Haar-embedded EPR blocks in C^4 x C^4"});
    }
    {
        Rng rng(4);
        entries.push_back({"extended-4", build_random_extended_ideal(4, {8, 8}, rng),
                           both(Verdict::pass, Verdict::pass), 4, "four Haar-embedded EPR blocks in C^8 x C^8"});
    }
    {
        Rng rng(7);
        entries.push_back({"degenerate-alpha", build_random_extended_ideal(2, {6, 6}, rng, {.equal_magnitudes = true}),
                           both(Verdict::pass, Verdict::pass), 7,
                           "two blocks with equal |alpha_i|; the Schmidt spectrum is degenerate"});
    }

    entries.push_back({"classical", build_classical_source(), both(Verdict::pass, Verdict::not_applicable),
                       std::nullopt,
                       "hidden variable lambda in {0,1}^2 copied to both factors; all projectors diagonal. "
                       "Passes the conjugate-coding test exactly, yet an eavesdropper reading lambda learns "
                       "every key bit. No diagonal index-1 completion passes the self-checking test."});

    struct Rung {
        const char *label;
        double epsilon;
        std::uint64_t seed;
    };
    for (const Rung &rung : {Rung{"1e-4", 1e-4, 101}, Rung{"1e-3", 1e-3, 102}, Rung{"1e-2", 1e-2, 103}}) {
        Rng rng(rung.seed);
        entries.push_back({std::string("perturbed-") + rung.label,
                           perturb_source(build_ideal_source(), rung.epsilon, PerturbMode::measurement, rng),
                           both(Verdict::fail, Verdict::fail), rung.seed,
                           "ideal source with every measurement basis rotated by up to epsilon"});
    }
    {
        Rng rng(201);
        entries.push_back({"perturbed-state-1e-3",
                           perturb_source(build_ideal_source(), 1e-3, PerturbMode::state, rng),
                           both(Verdict::fail, Verdict::fail), 201, "ideal source with psi mixed with noise at 1e-3"});
    }
    return entries;
}

}  // namespace selfcheck
