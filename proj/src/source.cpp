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

#include "selfcheck/source.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "selfcheck/errors.hpp"

namespace selfcheck {

namespace {

void require_index(int index) {
    if (index < 1 || index > 3) {
        throw ContractError("measurement index must be 1, 2 or 3, got " + std::to_string(index));
    }
}

// Version of the ideal pair for `index` lifted into a block sum.
ProjectorPair embedded_pair(int index, std::span<const ExtendedBlock> blocks, bool side_a, std::size_t dim) {
    CMatrix plus(dim, dim);
    const CMatrix local = ideal_local_projector(index, Outcome::plus);
    for (const ExtendedBlock &b : blocks) {
        const CMatrix &e = side_a ? b.embed_a : b.embed_b;
        plus += e * local * e.adjoint();
    }
    return complementary_pair(Projector(std::move(plus)));
}

void require_isometry(const CMatrix &e, std::size_t dim, const char *side) {
    if (e.rows() != dim || e.cols() != 2) {
        throw ShapeError(std::string("extended ideal: embedding on factor ") + side + " must be " +
                         std::to_string(dim) + "x2");
    }
    const double defect = max_abs_diff(e.adjoint() * e, CMatrix::identity(2));
    if (defect > 1e-10) {
        throw ValidationError(std::string("extended ideal: embedding on factor ") + side +
                              " is not an isometry (defect " + std::to_string(defect) + ")");
    }
}

}  // namespace

double basis_angle(int index) {
    require_index(index);
    switch (index) {
        case 1:
            return 0.0;
        case 2:
            return -kTheta;
        default:
            return kTheta;
    }
}

AngleBasis basis_at_angle(double phi) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    return AngleBasis{phi, CVector{c, s}, CVector{-s, c}};
}

CMatrix ideal_local_projector(int index, Outcome x) {
    const AngleBasis basis = basis_at_angle(basis_angle(index));
    const CVector &v = basis.vec(x);
    return CMatrix::outer(v, v);
}

ProjectorPair complementary_pair(Projector plus) {
    Projector minus = plus.complement();
    return ProjectorPair{std::move(plus), std::move(minus)};
}

// ---------------------------------------------------------------- MeasurementFamily

MeasurementFamily::MeasurementFamily(std::size_t dim, std::array<std::optional<ProjectorPair>, 3> pairs)
    : dim_(dim), pairs_(std::move(pairs)) {
    const CMatrix id = CMatrix::identity(dim_);
    for (int index : kAllIndices) {
        const auto &pair = pairs_[index - 1];
        if (!pair) {
            continue;
        }
        if (pair->plus.dim() != dim_ || pair->minus.dim() != dim_) {
            throw ShapeError("measurement " + std::to_string(index) + ": projector dimension does not match factor " +
                             std::to_string(dim_));
        }
        const CMatrix &p = pair->plus.matrix();
        const CMatrix &m = pair->minus.matrix();
        const double completeness = max_abs_diff(p + m, id);
        if (completeness > kCompletenessTol) {
            throw ValidationError("measurement " + std::to_string(index) + ": plus + minus != I (defect " +
                                  std::to_string(completeness) + ")");
        }
        const double overlap = max_abs_diff(p * m, CMatrix(dim_, dim_));
        if (overlap > kCompletenessTol) {
            throw ValidationError("measurement " + std::to_string(index) + ": plus * minus != 0 (defect " +
                                  std::to_string(overlap) + ")");
        }
    }
}

bool MeasurementFamily::has(int index) const {
    require_index(index);
    return pairs_[index - 1].has_value();
}

const ProjectorPair &MeasurementFamily::pair(int index) const {
    if (!has(index)) {
        throw ContractError("measurement " + std::to_string(index) + " is absent");
    }
    return *pairs_[index - 1];
}

MeasurementFamily MeasurementFamily::with(int index, ProjectorPair pair) const {
    require_index(index);
    auto pairs = pairs_;
    pairs[index - 1] = std::move(pair);
    return MeasurementFamily(dim_, std::move(pairs));
}

MeasurementFamily MeasurementFamily::without(int index) const {
    require_index(index);
    auto pairs = pairs_;
    pairs[index - 1].reset();
    return MeasurementFamily(dim_, std::move(pairs));
}

// ---------------------------------------------------------------- Source

Source::Source(BipartiteShape shape, CVector psi, MeasurementFamily p_family, MeasurementFamily r_family)
    : shape_(shape), psi_(std::move(psi)), p_(std::move(p_family)), r_(std::move(r_family)) {
    if (shape_.dim_a == 0 || shape_.dim_b == 0) {
        throw ShapeError("source dimensions must be positive");
    }
    if (psi_.dim() != shape_.joint_dim()) {
        throw ShapeError("psi has dimension " + std::to_string(psi_.dim()) + ", shape needs " +
                         std::to_string(shape_.joint_dim()));
    }
    if (p_.dim() != shape_.dim_a || r_.dim() != shape_.dim_b) {
        throw ShapeError("measurement family dimensions do not match the source shape");
    }
    const double n2 = psi_.norm_squared();
    if (std::abs(std::sqrt(n2) - 1.0) > kNormTol) {
        throw ValidationError("psi is not normalized (norm " + std::to_string(std::sqrt(n2)) + ")");
    }
    for (int index : {2, 3}) {
        if (!p_.has(index) || !r_.has(index)) {
            throw ValidationError("measurement " + std::to_string(index) + " must be present on both factors");
        }
    }
    if (p_.has(1) != r_.has(1)) {
        throw ValidationError("measurement 1 must be present on both factors or on neither");
    }
    kind_ = p_.has(1) ? SourceKind::self_checking_candidate : SourceKind::conjugate_coding;
}

std::vector<int> Source::indices() const {
    if (kind_ == SourceKind::self_checking_candidate) {
        return {1, 2, 3};
    }
    return {2, 3};
}

CVector Source::apply_p(int index, Outcome x, const CVector &v) const { return apply_a(p_.op(index, x), v, shape_); }

CVector Source::apply_r(int index, Outcome x, const CVector &v) const { return apply_b(r_.op(index, x), v, shape_); }

Source Source::swapped() const {
    const BipartiteShape flipped{shape_.dim_b, shape_.dim_a};
    CVector psi(psi_.dim());
    for (std::size_t a = 0; a < shape_.dim_a; ++a) {
        for (std::size_t b = 0; b < shape_.dim_b; ++b) {
            psi[flipped.joint_index(b, a)] = psi_[shape_.joint_index(a, b)];
        }
    }
    return Source(flipped, std::move(psi), r_, p_);
}

Source Source::with_psi(CVector psi) const { return Source(shape_, std::move(psi), p_, r_); }

// ---------------------------------------------------------------- CorrelationTable

CorrelationTable::CorrelationTable(std::vector<int> indices) : indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    for (int i : indices_) {
        require_index(i);
    }
}

bool CorrelationTable::has(int index) const {
    return std::find(indices_.begin(), indices_.end(), index) != indices_.end();
}

std::size_t CorrelationTable::slot(int alpha, int beta, Outcome x, Outcome y) {
    require_index(alpha);
    require_index(beta);
    return static_cast<std::size_t>(((alpha - 1) * 3 + (beta - 1)) * 4 + bit_of(x) * 2 + bit_of(y));
}

double CorrelationTable::at(int alpha, int beta, Outcome x, Outcome y) const {
    if (!has(alpha) || !has(beta)) {
        throw ContractError("correlation table has no entry for (" + std::to_string(alpha) + "," +
                            std::to_string(beta) + ")");
    }
    return data_[slot(alpha, beta, x, y)];
}

double &CorrelationTable::at(int alpha, int beta, Outcome x, Outcome y) {
    if (!has(alpha) || !has(beta)) {
        throw ContractError("correlation table has no entry for (" + std::to_string(alpha) + "," +
                            std::to_string(beta) + ")");
    }
    return data_[slot(alpha, beta, x, y)];
}

double max_abs_diff(const CorrelationTable &a, const CorrelationTable &b) {
    double m = 0.0;
    for (int alpha : a.indices()) {
        for (int beta : a.indices()) {
            if (!b.has(alpha) || !b.has(beta)) {
                continue;
            }
            for (Outcome x : kOutcomes) {
                for (Outcome y : kOutcomes) {
                    m = std::max(m, std::abs(a.at(alpha, beta, x, y) - b.at(alpha, beta, x, y)));
                }
            }
        }
    }
    return m;
}

// ---------------------------------------------------------------- constructions

Source build_ideal_source() {
    const AngleBasis e = basis_at_angle(0.0);
    const CVector psi = (1.0 / std::sqrt(2.0)) * (tensor_vec(e.e0, e.e0) + tensor_vec(e.e1, e.e1));
    std::array<std::optional<ProjectorPair>, 3> pairs;
    for (int index : kAllIndices) {
        pairs[index - 1] = ProjectorPair{Projector(ideal_local_projector(index, Outcome::plus)),
                                         Projector(ideal_local_projector(index, Outcome::minus))};
    }
    MeasurementFamily family(2, pairs);
    return Source({2, 2}, psi, family, family);
}

CorrelationTable ideal_reference_table() {
    CorrelationTable table({1, 2, 3});
    for (int alpha : kAllIndices) {
        for (int beta : kAllIndices) {
            const double delta = basis_angle(alpha) - basis_angle(beta);
            const double c2 = std::cos(delta) * std::cos(delta);
            const double s2 = std::sin(delta) * std::sin(delta);
            for (Outcome x : kOutcomes) {
                for (Outcome y : kOutcomes) {
                    table.at(alpha, beta, x, y) = x == y ? 0.5 * c2 : 0.5 * s2;
                }
            }
        }
    }
    return table;
}

CorrelationTable correlation_table(const Source &s) {
    CorrelationTable table(s.indices());
    for (int beta : s.indices()) {
        for (Outcome y : kOutcomes) {
            const CVector projected = s.apply_p(beta, y, s.psi());
            for (int alpha : s.indices()) {
                for (Outcome x : kOutcomes) {
                    table.at(alpha, beta, x, y) = s.apply_r(alpha, x, projected).norm_squared();
                }
            }
        }
    }
    return table;
}

Emission emission_branch(const Source &s, int button, Outcome x) {
    const CVector branch = s.apply_p(button, x, s.psi());
    Emission out;
    out.outcome = x;
    out.probability = branch.norm_squared();
    out.density = reduced_density_b(branch, s.shape());
    out.normalized_density = out.probability > 0.0 ? (1.0 / out.probability) * out.density
                                                   : CMatrix(s.shape().dim_b, s.shape().dim_b);
    return out;
}

Emission emit(const Source &s, int button, Rng &rng) {
    if (!s.p_family().has(button)) {
        throw ContractError("button " + std::to_string(button) + " is not present on the source");
    }
    const double p_plus = s.apply_p(button, Outcome::plus, s.psi()).norm_squared();
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const Outcome x = u01(rng) < p_plus ? Outcome::plus : Outcome::minus;
    return emission_branch(s, button, x);
}

CorrelationTable correlation_table_mixed(const CMatrix &rho, BipartiteShape shape, const MeasurementFamily &p_family,
                                         const MeasurementFamily &r_family) {
    std::vector<int> indices;
    for (int i : kAllIndices) {
        if (p_family.has(i) && r_family.has(i)) {
            indices.push_back(i);
        }
    }
    CorrelationTable table(indices);
    const CMatrix id_a = CMatrix::identity(shape.dim_a);
    const CMatrix id_b = CMatrix::identity(shape.dim_b);
    for (int beta : indices) {
        for (Outcome y : kOutcomes) {
            const CMatrix p = tensor_op(p_family.op(beta, y), id_b);
            const CMatrix projected = p * rho * p;
            for (int alpha : indices) {
                for (Outcome x : kOutcomes) {
                    const CMatrix r = tensor_op(id_a, r_family.op(alpha, x));
                    table.at(alpha, beta, x, y) = (r * projected).trace().real();
                }
            }
        }
    }
    return table;
}

Source purify(const CMatrix &rho, BipartiteShape shape, const MeasurementFamily &p_family,
              const MeasurementFamily &r_family) {
    const std::size_t n = shape.joint_dim();
    if (rho.rows() != n || rho.cols() != n) {
        throw ShapeError("purify: density is " + std::to_string(rho.rows()) + "x" + std::to_string(rho.cols()) +
                         ", shape needs " + std::to_string(n));
    }
    if (p_family.dim() != shape.dim_a || r_family.dim() != shape.dim_b) {
        throw ShapeError("purify: measurement family dimensions do not match the shape");
    }
    const double herm = hermiticity_defect(rho);
    if (herm > 1e-12) {
        throw ValidationError("purify: density is not Hermitian (defect " + std::to_string(herm) + ")");
    }
    const double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > 1e-12) {
        throw ValidationError("purify: density trace is " + std::to_string(tr) + ", expected 1");
    }
    const EigenResult eig = hermitian_eigen(rho);
    if (eig.values.front() < -1e-10) {
        throw ValidationError("purify: density has negative eigenvalue " + std::to_string(eig.values.front()));
    }

    std::vector<std::size_t> kept;
    const double cutoff = 1e-14;
    for (std::size_t k = 0; k < eig.values.size(); ++k) {
        if (eig.values[k] > cutoff) {
            kept.push_back(k);
        }
    }
    const std::size_t rank = kept.size();
    const BipartiteShape enlarged{shape.dim_a * rank, shape.dim_b};

    // psi[(i_a * rank + k) * dim_b + i_b] = sqrt(lambda_k) v_k[i_a * dim_b + i_b]
    CVector psi(enlarged.joint_dim());
    for (std::size_t k = 0; k < rank; ++k) {
        const double w = std::sqrt(eig.values[kept[k]]);
        for (std::size_t ia = 0; ia < shape.dim_a; ++ia) {
            for (std::size_t ib = 0; ib < shape.dim_b; ++ib) {
                psi[enlarged.joint_index(ia * rank + k, ib)] = w * eig.vectors(shape.joint_index(ia, ib), kept[k]);
            }
        }
    }
    // Absorb the rounding of the discarded eigenvalues.
    psi = psi.normalized();

    std::array<std::optional<ProjectorPair>, 3> pairs;
    const CMatrix id_anc = CMatrix::identity(rank);
    for (int index : kAllIndices) {
        if (!p_family.has(index)) {
            continue;
        }
        const ProjectorPair &pp = p_family.pair(index);
        pairs[index - 1] = ProjectorPair{Projector(tensor_op(pp.plus.matrix(), id_anc)),
                                         Projector(tensor_op(pp.minus.matrix(), id_anc))};
    }
    return Source(enlarged, std::move(psi), MeasurementFamily(enlarged.dim_a, std::move(pairs)), r_family);
}

Source build_extended_ideal(std::span<const ExtendedBlock> blocks, BipartiteShape shape) {
    if (blocks.empty()) {
        throw ValidationError("extended ideal: need at least one block");
    }
    double weight = 0.0;
    for (const ExtendedBlock &b : blocks) {
        require_isometry(b.embed_a, shape.dim_a, "A");
        require_isometry(b.embed_b, shape.dim_b, "B");
        weight += 2.0 * std::norm(b.alpha);
    }
    if (std::abs(weight - 1.0) > 1e-12) {
        throw ValidationError("extended ideal: sum of 2|alpha_i|^2 is " + std::to_string(weight) + ", expected 1");
    }
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        for (std::size_t j = i + 1; j < blocks.size(); ++j) {
            const double oa = max_abs_diff(blocks[i].embed_a.adjoint() * blocks[j].embed_a, CMatrix(2, 2));
            const double ob = max_abs_diff(blocks[i].embed_b.adjoint() * blocks[j].embed_b, CMatrix(2, 2));
            if (oa > 1e-10 || ob > 1e-10) {
                throw ValidationError("extended ideal: blocks " + std::to_string(i) + " and " + std::to_string(j) +
                                      " are not orthogonal");
            }
        }
    }

    CVector psi(shape.joint_dim());
    for (const ExtendedBlock &b : blocks) {
        for (std::size_t x = 0; x < 2; ++x) {
            psi += b.alpha * tensor_vec(b.embed_a.column(x), b.embed_b.column(x));
        }
    }

    std::array<std::optional<ProjectorPair>, 3> p_pairs;
    std::array<std::optional<ProjectorPair>, 3> r_pairs;
    for (int index : kAllIndices) {
        p_pairs[index - 1] = embedded_pair(index, blocks, true, shape.dim_a);
        r_pairs[index - 1] = embedded_pair(index, blocks, false, shape.dim_b);
    }
    return Source(shape, std::move(psi), MeasurementFamily(shape.dim_a, std::move(p_pairs)),
                  MeasurementFamily(shape.dim_b, std::move(r_pairs)));
}

}  // namespace selfcheck
