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

#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "selfcheck/checker.hpp"
#include "selfcheck/decomposer.hpp"
#include "selfcheck/errors.hpp"
#include "selfcheck/gallery.hpp"
#include "selfcheck/source.hpp"
#include "test_util.hpp"

using namespace selfcheck;
using namespace selfcheck::testing;

namespace {

const double kS = std::sin(kTheta);
const double kC = std::cos(kTheta);

CMatrix planted_projector(const std::vector<ExtendedBlock> &blocks, Factor side) {
    const std::size_t dim = side == Factor::a ? blocks[0].embed_a.rows() : blocks[0].embed_b.rows();
    CMatrix m(dim, dim);
    for (const ExtendedBlock &b : blocks) {
        const CMatrix &e = side == Factor::a ? b.embed_a : b.embed_b;
        m += e * e.adjoint();
    }
    return m;
}

double alpha_weight(const Decomposition &d) {
    double w = 0.0;
    for (const Block &b : d.blocks) {
        w += 2.0 * std::norm(b.alpha);
    }
    return w;
}

/// Conjugates every projector by the local unitary and applies it to psi.
Source rotate_locally(const Source &s, const CMatrix &ua, const CMatrix &ub) {
    auto family = [](const MeasurementFamily &f, const CMatrix &u) {
        std::array<std::optional<ProjectorPair>, 3> pairs;
        for (int i : kAllIndices) {
            if (f.has(i)) {
                pairs[i - 1] = ProjectorPair{Projector(u * f.op(i, Outcome::plus) * u.adjoint()),
                                             Projector(u * f.op(i, Outcome::minus) * u.adjoint())};
            }
        }
        return MeasurementFamily(f.dim(), pairs);
    };
    const CVector psi = tensor_op(ua, ub) * s.psi();
    return Source(s.shape(), psi, family(s.p_family(), ua), family(s.r_family(), ub));
}

const std::vector<std::string> kRequiredLemmas{
    "L1",           "L2",        "L2_swapped", "L3",         "L3_minus_variant", "L3_swapped",
    "L4",           "L4_swapped", "L7",        "L7_swapped", "block_actions",    "commutator",
    "completion",   "completion_identity",     "completion_identity_swapped",    "orthogonality",
    "residual",     "block_invariants",        "block_overlap"};

}  // namespace

TEST(u_vectors, invariants) {
    const auto u = u_vectors();
    EXPECT_EQ(u[1] + u[2], u[0]);
    EXPECT_EQ(u[3] + u[4], u[0]);
    EXPECT_LE(std::abs(inner(u[1], u[2])), 1e-15);
    EXPECT_LE(std::abs(inner(u[3], u[4])), 1e-15);
    EXPECT_LE(max_abs_diff(u[1] - u[3], CVector({0, 2 * kS * kC})), 1e-15);
    const CMatrix g = gram_matrix(u);
    EXPECT_NEAR(g(0, 1).real(), 0.8535533905932737, 1e-15);
    EXPECT_NEAR(std::abs(g(1, 2)), 0.0, 1e-15);
    EXPECT_NEAR(block_beta(), std::sqrt(2.0), 1e-15);
}

TEST(decompose, ideal_single_block) {
    const Source s = build_ideal_source();
    const Decomposition d = decompose(s);
    ASSERT_EQ(d.blocks.size(), 1u);
    EXPECT_NEAR(std::abs(d.blocks[0].alpha), std::sqrt(0.5), 1e-12);
    EXPECT_LE(d.residual, 1e-10);
    for (const auto &[id, dev] : d.diagnostics.deviations()) {
        EXPECT_LE(dev, 1e-12) << id;
    }
    for (const std::string &id : kRequiredLemmas) {
        EXPECT_TRUE(d.diagnostics.has(id)) << id;
    }
}

TEST(decompose, ideal_h_and_k_vectors) {
    const Source s = build_ideal_source();
    const Decomposition d = decompose(s);
    const Block &b = d.blocks[0];
    const CVector &psi = s.psi();
    const CVector h = s.apply_p(1, Outcome::plus, s.apply_r(3, Outcome::plus, psi)) -
                      s.apply_p(1, Outcome::plus, s.apply_r(2, Outcome::plus, psi));
    // Under the isomorphism sqrt(2) h corresponds to u2 - u4 = (0, 2 sin cos).
    EXPECT_NEAR(h.norm(), 2 * kS * kC / std::sqrt(2.0), 1e-12);
    const CVector p1 = s.apply_p(1, Outcome::plus, psi);
    const CVector k = s.apply_p(2, Outcome::plus, p1) - (kC * kC) * p1;
    EXPECT_LE(max_abs_diff(k, (-kS * kC) * b.alpha * tensor_vec(b.a1, b.b0)), 1e-12);
    EXPECT_NEAR(commutator_norm(s.p_family().op(2, Outcome::plus), s.p_family().op(3, Outcome::plus)), 0.5, 1e-12);
    const CMatrix comm = s.p_family().op(2, Outcome::plus) * s.p_family().op(3, Outcome::plus) -
                         s.p_family().op(3, Outcome::plus) * s.p_family().op(2, Outcome::plus);
    EXPECT_NEAR((comm * b.a0).norm(), 0.5, 1e-12);
}

TEST(decompose, random_three_blocks_recover_planted_spans) {
    Rng rng(51);
    const BipartiteShape shape{8, 8};
    const auto blocks = random_blocks(3, shape, rng, true);
    const Source s = build_extended_ideal(blocks, shape);
    const Decomposition d = decompose(s);
    ASSERT_EQ(d.blocks.size(), 3u);
    EXPECT_LE(d.residual, 1e-8);
    EXPECT_TRUE(d.diagnostics.all_pass());
    EXPECT_LE(operator_norm(block_sum_projector(d, Factor::a) - planted_projector(blocks, Factor::a)), 1e-8);
    EXPECT_LE(operator_norm(block_sum_projector(d, Factor::b) - planted_projector(blocks, Factor::b)), 1e-8);
    EXPECT_NEAR(alpha_weight(d), 1.0, 1e-9);
}

TEST(decompose, degenerate_alphas) {
    Rng rng(52);
    const BipartiteShape shape{6, 5};
    const CMatrix ua = random_unitary(6, rng);
    const CMatrix ub = random_unitary(5, rng);
    const std::vector<ExtendedBlock> blocks{{cd{0.5, 0.0}, columns(ua, 0, 2), columns(ub, 0, 2)},
                                            {std::polar(0.5, 1.1), columns(ua, 2, 2), columns(ub, 2, 2)}};
    const Source s = build_extended_ideal(blocks, shape);
    const Decomposition d = decompose(s);
    EXPECT_EQ(d.blocks.size(), 2u);
    EXPECT_TRUE(d.diagnostics.all_pass());
    EXPECT_LE(operator_norm(block_sum_projector(d, Factor::b) - planted_projector(blocks, Factor::b)), 1e-8);
}

TEST(decompose, random_suite_block_properties) {
    Rng rng(53);
    for (int k = 0; k < 30; ++k) {
        ExtendedIdealOptions opts;
        opts.equal_magnitudes = k % 5 == 0;
        const std::size_t n = 1 + static_cast<std::size_t>(k % 4);
        const Source s = build_random_extended_ideal(n, {2 * n + static_cast<std::size_t>(k % 3), 2 * n + 1}, rng, opts);
        const Decomposition d = decompose(s);
        EXPECT_EQ(d.blocks.size(), n);
        EXPECT_TRUE(d.diagnostics.all_pass()) << "k=" << k;
        EXPECT_NEAR(alpha_weight(d), 1.0, 1e-9);
        for (const Block &b : d.blocks) {
            EXPECT_NEAR(b.b1.norm(), 1.0, 1e-9);
            EXPECT_LE(std::abs(inner(b.b0, b.b1)), 1e-9);
            EXPECT_LE((s.r_family().op(1, Outcome::plus) * b.b0 - b.b0).norm(), 1e-9);
        }
    }
}

TEST(decompose, covariant_under_local_unitaries) {
    Rng rng(54);
    const BipartiteShape shape{6, 6};
    const Source s = build_random_extended_ideal(2, shape, rng);
    const CMatrix ua = random_unitary(6, rng);
    const CMatrix ub = random_unitary(6, rng);
    const Decomposition before = decompose(s);
    const Decomposition after = decompose(rotate_locally(s, ua, ub));
    const CMatrix pa = ua * block_sum_projector(before, Factor::a) * ua.adjoint();
    const CMatrix pb = ub * block_sum_projector(before, Factor::b) * ub.adjoint();
    EXPECT_LE(operator_norm(block_sum_projector(after, Factor::a) - pa), 1e-8);
    EXPECT_LE(operator_norm(block_sum_projector(after, Factor::b) - pb), 1e-8);
}

TEST(decompose, rejects_non_conforming_sources) {
    Rng rng(55);
    const Source bad = perturb_source(build_ideal_source(), 1e-3, PerturbMode::measurement, rng);
    try {
        (void)decompose(bad);
        FAIL() << "expected PreconditionError";
    } catch (const PreconditionError &e) {
        EXPECT_FALSE(e.report().pass);
        EXPECT_GT(e.report().max_abs_dev, 1e-9);
    }
    EXPECT_THROW(decompose(build_classical_source()), ContractError);
}

TEST(decompose, classical_diagonal_completions_rejected) {
    const Source classical = build_classical_source();
    int rejected = 0;
    for (std::uint32_t pm = 0; pm < 16; ++pm) {
        for (std::uint32_t rm = 0; rm < 16; ++rm) {
            std::vector<cd> dp(4);
            std::vector<cd> dr(4);
            for (int i = 0; i < 4; ++i) {
                dp[i] = (pm >> i) & 1U ? 1.0 : 0.0;
                dr[i] = (rm >> i) & 1U ? 1.0 : 0.0;
            }
            const Source s =
                complete_with_index1(classical, Projector(CMatrix::diagonal(dp)), Projector(CMatrix::diagonal(dr)));
            try {
                (void)decompose(s);
            } catch (const PreconditionError &) {
                ++rejected;
            }
        }
    }
    EXPECT_EQ(rejected, 256);
}

TEST(decompose, tight_block_tolerance_is_structural_failure) {
    Rng rng(56);
    const Source s = build_random_extended_ideal(3, {7, 7}, rng);
    DecomposeOptions opts;
    opts.block_tol = 0.0;
    EXPECT_THROW(decompose(s, opts), StructuralError);
}

TEST(verify_lemma_identities, ideal_and_random) {
    const LemmaReport ideal = verify_lemma_identities(build_ideal_source());
    for (const auto &[id, dev] : ideal.deviations()) {
        EXPECT_LE(dev, 1e-12) << id;
    }
    Rng rng(57);
    for (int k = 0; k < 10; ++k) {
        const Source s = build_random_extended_ideal(1 + k % 3, {7, 8}, rng);
        const LemmaReport r = verify_lemma_identities(s);
        for (const auto &[id, dev] : r.deviations()) {
            EXPECT_LE(dev, 1e-10) << id;
        }
    }
}

TEST(verify_lemma_identities, product_state_breaks_l1) {
    const Source s = build_ideal_source().with_psi({1, 0, 0, 0});
    // Oracle: || P_2^+ psi - R_2^+ psi || for psi = e0 (x) e0.
    const AngleBasis b = basis_at_angle(-kTheta);
    const CMatrix p = CMatrix::outer(b.e0, b.e0);
    const CVector e0{1, 0};
    const double want = (tensor_vec(p * e0, e0) - tensor_vec(e0, p * e0)).norm();
    const LemmaReport r = verify_lemma_identities(s);
    EXPECT_GT(want, 0.1);
    EXPECT_GE(r.deviation("L1"), want - 1e-12);
    EXPECT_GT(r.deviation("L1"), 0.1);
}

TEST(diagnose, localizes_failures_without_throwing) {
    Rng rng(58);
    const Source bad = perturb_source(build_ideal_source(), 1e-2, PerturbMode::measurement, rng);
    const LemmaReport r = diagnose(bad);
    EXPECT_FALSE(r.all_pass());
    EXPECT_GT(r.deviation("self_checking"), 1e-9);
    EXPECT_TRUE(r.has("L1"));
    const LemmaReport good = diagnose(build_ideal_source());
    EXPECT_TRUE(good.all_pass());
    EXPECT_TRUE(good.has("orthogonality"));
}

TEST(orthogonality_witness, reproduces_overlap_contradiction) {
    // b_i(0), b_i(1), b_j(0) on the first three axes; b_j(1) = (0, s, 0, t).
    const double s = 0.6;
    const double t = 0.8;
    const CVector bi0{1, 0, 0, 0};
    const CVector bi1{0, 1, 0, 0};
    const CVector bj0{0, 0, 1, 0};
    const CVector bj1{0, s, 0, t};
    EXPECT_NEAR(std::abs(orthogonality_witness(bi0, bi1, bj0, bj1) - cd{s * kS * kC, 0.0}), 0.0, 1e-15);
    // Independent evaluation of <w, w'>.
    const CVector w{0, s * kS, kC, t * kS};
    const CVector wp{-kS, kC, 0, 0};
    EXPECT_NEAR(inner(w, wp).real(), s * kS * kC, 1e-15);
    EXPECT_NEAR(std::abs(orthogonality_witness(bi0, bi1, bj0, CVector{0, 0, 0, 1})), 0.0, 1e-15);
}

TEST(commutator, classical_projectors_commute) {
    const Source c = build_classical_source();
    for (const MeasurementFamily *f : {&c.p_family(), &c.r_family()}) {
        EXPECT_EQ(commutator_norm(f->op(2, Outcome::plus), f->op(3, Outcome::plus)), 0.0);
    }
}

TEST(lemma_report, pass_semantics) {
    LemmaReport r(1e-8);
    r.record("x", 1e-9);
    r.record("x", 5e-9);
    r.record("x", 2e-9);
    EXPECT_EQ(r.deviation("x"), 5e-9);
    EXPECT_TRUE(r.pass("x"));
    r.record("y", 2e-8);
    EXPECT_FALSE(r.pass("y"));
    EXPECT_FALSE(r.all_pass());
}
