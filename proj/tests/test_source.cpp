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
#include <vector>

#include "selfcheck/checker.hpp"
#include "selfcheck/errors.hpp"
#include "selfcheck/gallery.hpp"
#include "selfcheck/source.hpp"
#include "test_util.hpp"

using namespace selfcheck;
using namespace selfcheck::testing;

namespace {

// Frozen closed-form values of the ideal table.
constexpr double kCos2Half = 0.42677669529663687;  // cos^2(pi/8) / 2
constexpr double kSin2Half = 0.07322330470336313;  // sin^2(pi/8) / 2

// Oracle: for real qubit bases the ideal entry is |<e_x(a_alpha), e_y(a_beta)>|^2 / 2.
double oracle_entry(int alpha, int beta, Outcome x, Outcome y) {
    auto vec = [](int index, Outcome o) {
        const double a = index == 1 ? 0.0 : (index == 2 ? -kTheta : kTheta);
        return o == Outcome::plus ? std::vector<double>{std::cos(a), std::sin(a)}
                                  : std::vector<double>{-std::sin(a), std::cos(a)};
    };
    const auto u = vec(alpha, x);
    const auto v = vec(beta, y);
    const double ip = u[0] * v[0] + u[1] * v[1];
    return ip * ip / 2.0;
}

}  // namespace

TEST(basis_at_angle, examples) {
    const AngleBasis b0 = basis_at_angle(0.0);
    EXPECT_EQ(b0.e0, CVector({1, 0}));
    EXPECT_EQ(b0.e1, CVector({0, 1}));
    const AngleBasis b4 = basis_at_angle(std::numbers::pi / 4);
    EXPECT_LE(max_abs_diff(b4.e0, CVector({std::sqrt(0.5), std::sqrt(0.5)})), 1e-15);
}

TEST(basis_at_angle, rectilinear_diagonal_relation) {
    const AngleBasis minus = basis_at_angle(-kTheta);
    const AngleBasis plus = basis_at_angle(kTheta);
    const CVector rhs = cd{1.0 / std::sqrt(2.0), 0.0} * (minus.e0 + minus.e1);
    EXPECT_LE(max_abs_diff(plus.e0, rhs), 1e-12);
}

TEST(ideal_source, basis_invariant_bell_state) {
    const Source s = build_ideal_source();
    for (double phi : {0.0, -kTheta, kTheta}) {
        const AngleBasis b = basis_at_angle(phi);
        const CVector bell = cd{std::sqrt(0.5), 0.0} * (tensor_vec(b.e0, b.e0) + tensor_vec(b.e1, b.e1));
        EXPECT_LE(max_abs_diff(s.psi(), bell), 1e-12);
    }
    EXPECT_EQ(s.kind(), SourceKind::self_checking_candidate);
}

TEST(ideal_source, closed_form_entries) {
    const CorrelationTable t = correlation_table(build_ideal_source());
    EXPECT_NEAR(t.at(1, 2, Outcome::plus, Outcome::plus), kCos2Half, 1e-12);
    EXPECT_NEAR(t.at(1, 2, Outcome::plus, Outcome::minus), kSin2Half, 1e-12);
    EXPECT_NEAR(t.at(2, 3, Outcome::plus, Outcome::plus), 0.25, 1e-12);
    EXPECT_NEAR(std::cos(kTheta) * std::cos(kTheta) / 2, kCos2Half, 1e-16);
}

TEST(ideal_source, marginals_are_half) {
    const Source s = build_ideal_source();
    for (int a : kAllIndices) {
        for (Outcome x : kOutcomes) {
            EXPECT_NEAR(s.apply_p(a, x, s.psi()).norm_squared(), 0.5, 1e-12);
            EXPECT_NEAR(s.apply_r(a, x, s.psi()).norm_squared(), 0.5, 1e-12);
        }
    }
}

TEST(ideal_source, p_and_r_agree_on_psi) {
    const Source s = build_ideal_source();
    for (int a : kAllIndices) {
        for (Outcome x : kOutcomes) {
            EXPECT_LE(max_abs_diff(s.apply_p(a, x, s.psi()), s.apply_r(a, x, s.psi())), 1e-12);
        }
    }
}

TEST(ideal_reference_table, matches_oracle_and_numerics) {
    const CorrelationTable ref = ideal_reference_table();
    const CorrelationTable num = correlation_table(build_ideal_source());
    for (int a : kAllIndices) {
        for (int b : kAllIndices) {
            for (Outcome x : kOutcomes) {
                for (Outcome y : kOutcomes) {
                    EXPECT_NEAR(ref.at(a, b, x, y), oracle_entry(a, b, x, y), 1e-15);
                    EXPECT_NEAR(num.at(a, b, x, y), ref.at(a, b, x, y), 1e-12);
                }
            }
            EXPECT_NEAR(ref.at(a, a, Outcome::plus, Outcome::plus), 0.5, 1e-15);
            EXPECT_NEAR(ref.at(a, a, Outcome::plus, Outcome::minus), 0.0, 1e-15);
        }
    }
    EXPECT_NEAR(ref.at(1, 2, Outcome::plus, Outcome::minus), kSin2Half, 1e-15);
}

TEST(correlation_table, sums_to_one_and_classical_zero) {
    Rng rng(31);
    const Source ext = build_random_extended_ideal(3, {8, 7}, rng);
    for (const Source &s : {ext, build_classical_source()}) {
        const CorrelationTable t = correlation_table(s);
        for (int a : t.indices()) {
            for (int b : t.indices()) {
                double sum = 0.0;
                for (Outcome x : kOutcomes) {
                    for (Outcome y : kOutcomes) {
                        EXPECT_GE(t.at(a, b, x, y), 0.0);
                        sum += t.at(a, b, x, y);
                    }
                }
                EXPECT_NEAR(sum, 1.0, 1e-9);
            }
        }
    }
    const CorrelationTable c = correlation_table(build_classical_source());
    EXPECT_EQ(c.at(2, 2, Outcome::plus, Outcome::minus), 0.0);
    EXPECT_THROW((void)c.at(1, 2, Outcome::plus, Outcome::plus), ContractError);
}

TEST(correlation_table, global_phase_invariant) {
    Rng rng(32);
    const Source s = build_random_extended_ideal(2, {5, 6}, rng);
    const Source phased = s.with_psi(std::polar(1.0, 0.77) * s.psi());
    EXPECT_LE(max_abs_diff(correlation_table(s), correlation_table(phased)), 1e-15);
}

TEST(correlation_table, swap_exchanges_roles) {
    const Source ideal = build_ideal_source();
    EXPECT_LE(max_abs_diff(correlation_table(ideal), correlation_table(ideal.swapped())), 1e-15);

    Rng rng(33);
    const Source s = perturb_source(build_random_extended_ideal(2, {4, 5}, rng), 0.05, PerturbMode::measurement, rng);
    const CorrelationTable t = correlation_table(s);
    const CorrelationTable ts = correlation_table(s.swapped());
    for (int a : kAllIndices) {
        for (int b : kAllIndices) {
            for (Outcome x : kOutcomes) {
                for (Outcome y : kOutcomes) {
                    EXPECT_NEAR(ts.at(a, b, x, y), t.at(b, a, y, x), 1e-12);
                }
            }
        }
    }
}

TEST(source, validation) {
    const Source ideal = build_ideal_source();
    EXPECT_THROW(ideal.with_psi(cd{1.01, 0.0} * ideal.psi()), ValidationError);
    EXPECT_THROW(ideal.with_psi(CVector{1, 0, 0}), ShapeError);
    EXPECT_THROW(Source(ideal.shape(), ideal.psi(), ideal.p_family().without(1), ideal.r_family()), ValidationError);
    EXPECT_THROW(Source(ideal.shape(), ideal.psi(), ideal.p_family().without(2), ideal.r_family().without(2)),
                 ValidationError);
    const Source conj(ideal.shape(), ideal.psi(), ideal.p_family().without(1), ideal.r_family().without(1));
    EXPECT_EQ(conj.kind(), SourceKind::conjugate_coding);
    EXPECT_EQ(conj.indices(), (std::vector<int>{2, 3}));
}

TEST(measurement_family, rejects_incomplete_pair) {
    const std::vector<cd> d10{1, 0};
    const Projector p(CMatrix::diagonal(d10));
    std::array<std::optional<ProjectorPair>, 3> pairs;
    pairs[1] = ProjectorPair{p, p};
    EXPECT_THROW(MeasurementFamily(2, pairs), ValidationError);
    pairs[1] = complementary_pair(p);
    EXPECT_NO_THROW(MeasurementFamily(2, pairs));
}

TEST(emit, ideal_branch_density) {
    const Source s = build_ideal_source();
    const Emission e = emission_branch(s, 2, Outcome::plus);
    const AngleBasis b = basis_at_angle(-kTheta);
    EXPECT_NEAR(e.probability, 0.5, 1e-12);
    EXPECT_LE(max_abs_diff(e.normalized_density, CMatrix::outer(b.e0, b.e0)), 1e-12);
    EXPECT_LE(max_abs_diff(e.density, cd{0.5, 0.0} * CMatrix::outer(b.e0, b.e0)), 1e-12);
    for (int button : {1, 2, 3}) {
        const double tr = (emission_branch(s, button, Outcome::plus).density +
                           emission_branch(s, button, Outcome::minus).density)
                              .trace()
                              .real();
        EXPECT_NEAR(tr, 1.0, 1e-12);
    }
}

TEST(emit, outcome_frequencies) {
    const Source s = build_ideal_source();
    Rng rng(34);
    const int n = 100000;
    int plus = 0;
    for (int k = 0; k < n; ++k) {
        plus += emit(s, 3, rng).outcome == Outcome::plus ? 1 : 0;
    }
    const double sigma = std::sqrt(0.25 / n);
    EXPECT_LE(std::abs(static_cast<double>(plus) / n - 0.5), 5 * sigma);
}

TEST(purify, pure_state_keeps_psi) {
    const Source s = build_ideal_source();
    const CMatrix rho = CMatrix::outer(s.psi(), s.psi());
    const Source p = purify(rho, s.shape(), s.p_family(), s.r_family());
    EXPECT_EQ(p.shape(), s.shape());
    EXPECT_NEAR(std::abs(inner(s.psi(), p.psi())), 1.0, 1e-12);
}

TEST(purify, maximally_mixed) {
    const Source s = build_ideal_source();
    const Source p = purify(cd{0.25, 0.0} * CMatrix::identity(4), s.shape(), s.p_family(), s.r_family());
    ASSERT_EQ(p.shape().dim_a, 8u);
    // Re-index (a, k, b) -> ((a, b), k) to split the joint system from the ancilla.
    CVector v(16);
    for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t k = 0; k < 4; ++k) {
            for (std::size_t b = 0; b < 2; ++b) {
                v[(a * 2 + b) * 4 + k] = p.psi()[(a * 4 + k) * 2 + b];
            }
        }
    }
    const SchmidtResult r = schmidt_decompose(v, {4, 4});
    ASSERT_EQ(r.coefficients.size(), 4u);
    for (double c : r.coefficients) {
        EXPECT_NEAR(c, 0.5, 1e-12);
    }
}

TEST(purify, random_mixed_table_matches_trace_formula) {
    Rng rng(35);
    const Source s = build_ideal_source();
    for (std::size_t rank : {1u, 2u, 3u, 4u}) {
        const CMatrix rho = random_density(4, rank, rng);
        const Source p = purify(rho, s.shape(), s.p_family(), s.r_family());
        const CorrelationTable t = correlation_table(p);
        const CorrelationTable mixed = correlation_table_mixed(rho, s.shape(), s.p_family(), s.r_family());
        for (int a : kAllIndices) {
            for (int b : kAllIndices) {
                for (Outcome x : kOutcomes) {
                    for (Outcome y : kOutcomes) {
                        // Oracle: tr((P (x) R) rho) with joint operators built explicitly.
                        const CMatrix op = tensor_op(s.p_family().op(b, y), s.r_family().op(a, x));
                        const double want = (op * rho).trace().real();
                        EXPECT_NEAR(t.at(a, b, x, y), want, 1e-10);
                        EXPECT_NEAR(mixed.at(a, b, x, y), want, 1e-12);
                    }
                }
            }
        }
    }
}

TEST(purify, rejects_invalid_densities) {
    const Source s = build_ideal_source();
    EXPECT_THROW(purify(cd{0.3, 0.0} * CMatrix::identity(4), s.shape(), s.p_family(), s.r_family()),
                 ValidationError);
    const std::vector<cd> neg{1.2, -0.2, 0.0, 0.0};
    EXPECT_THROW(purify(CMatrix::diagonal(neg), s.shape(), s.p_family(), s.r_family()), ValidationError);
    EXPECT_THROW(purify(CMatrix(4, 4, {0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}), s.shape(), s.p_family(),
                        s.r_family()),
                 ValidationError);
}

TEST(build_extended_ideal, single_block_equivalent_to_ideal) {
    Rng rng(36);
    const std::vector<ExtendedBlock> blocks{{cd{std::sqrt(0.5), 0.0}, random_unitary(2, rng), random_unitary(2, rng)}};
    const Source s = build_extended_ideal(blocks, {2, 2});
    EXPECT_LE(max_abs_diff(correlation_table(s), ideal_reference_table()), 1e-12);
}

TEST(build_extended_ideal, two_equal_blocks_pass) {
    Rng rng(37);
    const CMatrix ua = random_unitary(4, rng);
    const CMatrix ub = random_unitary(4, rng);
    const std::vector<ExtendedBlock> blocks{{cd{0.5, 0.0}, columns(ua, 0, 2), columns(ub, 0, 2)},
                                            {cd{0.0, 0.5}, columns(ua, 2, 2), columns(ub, 2, 2)}};
    EXPECT_TRUE(check_self_checking(build_extended_ideal(blocks, {4, 4})).pass);
}

TEST(build_extended_ideal, three_complex_blocks) {
    Rng rng(38);
    const auto blocks = random_blocks(3, {8, 8}, rng, true);
    const Source s = build_extended_ideal(blocks, {8, 8});
    EXPECT_LE(max_abs_diff(correlation_table(s), ideal_reference_table()), 1e-10);
}

TEST(build_extended_ideal, emitted_densities_are_block_mixtures) {
    Rng rng(39);
    const BipartiteShape shape{7, 8};
    const auto blocks = random_blocks(3, shape, rng, true);
    const Source s = build_extended_ideal(blocks, shape);
    for (int button : {2, 3}) {
        const AngleBasis b = basis_at_angle(basis_angle(button));
        for (Outcome x : kOutcomes) {
            CMatrix want(shape.dim_b, shape.dim_b);
            for (const ExtendedBlock &blk : blocks) {
                const CVector bx = blk.embed_b * b.vec(x);
                want += cd{2.0 * std::norm(blk.alpha) / 2.0, 0.0} * CMatrix::outer(bx, bx);
            }
            EXPECT_LE(max_abs_diff(emission_branch(s, button, x).density, want), 1e-10);
        }
    }
}

TEST(build_extended_ideal, rejects_bad_blocks) {
    Rng rng(40);
    const CMatrix ua = random_unitary(4, rng);
    const CMatrix ub = random_unitary(4, rng);
    // Overlapping embeddings on factor A.
    const std::vector<ExtendedBlock> overlap{{cd{0.5, 0.0}, columns(ua, 0, 2), columns(ub, 0, 2)},
                                             {cd{0.5, 0.0}, columns(ua, 1, 2), columns(ub, 2, 2)}};
    EXPECT_THROW(build_extended_ideal(overlap, {4, 4}), ValidationError);
    // Paper-literal normalization sum |alpha|^2 = 1 is rejected.
    const std::vector<ExtendedBlock> unnormalized{{cd{1.0, 0.0}, columns(ua, 0, 2), columns(ub, 0, 2)}};
    EXPECT_THROW(build_extended_ideal(unnormalized, {4, 4}), ValidationError);
    const std::vector<ExtendedBlock> not_isometry{{cd{std::sqrt(0.5), 0.0}, cd{2.0, 0.0} * columns(ua, 0, 2),
                                                   columns(ub, 0, 2)}};
    EXPECT_THROW(build_extended_ideal(not_isometry, {4, 4}), ValidationError);
}
