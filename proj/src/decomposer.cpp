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

#include "selfcheck/decomposer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "selfcheck/errors.hpp"

namespace selfcheck {

namespace {

const double kSin = std::sin(kTheta);
const double kCos = std::cos(kTheta);

std::string sci(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

void require_candidate(const Source &s, const char *what) {
    if (s.kind() != SourceKind::self_checking_candidate) {
        throw ContractError(std::string(what) + ": source has no measurement 1");
    }
}

// Lemma checks written for P on A and R on B; the exchanged forms run the
// same code on Source::swapped().

void lemma_identities_one_side(const Source &s, LemmaReport &report, const std::string &suffix) {
    const CVector &psi = s.psi();
    const CVector p1 = s.apply_p(1, Outcome::plus, psi);

    const CVector h = s.apply_p(1, Outcome::plus, s.apply_r(3, Outcome::plus, psi)) -
                      s.apply_p(1, Outcome::plus, s.apply_r(2, Outcome::plus, psi));
    report.record("L3" + suffix, (s.apply_r(1, Outcome::minus, h) - h).norm());

    const CVector h_minus = s.apply_p(1, Outcome::plus, s.apply_r(3, Outcome::minus, psi)) -
                            s.apply_p(1, Outcome::plus, s.apply_r(2, Outcome::minus, psi));
    report.record("L3_minus_variant" + suffix, (s.apply_r(1, Outcome::minus, h_minus) - h_minus).norm());

    const CVector k = s.apply_p(2, Outcome::plus, p1) - (kCos * kCos) * p1;
    const CVector lhs = s.apply_r(2, Outcome::plus, k) - s.apply_r(3, Outcome::plus, k);
    const CVector rhs = (2.0 * kSin * kSin * kCos * kCos) * s.apply_p(1, Outcome::minus, psi);
    report.record("L4" + suffix, (lhs - rhs).norm());
}

void global_gram_one_side(const Source &s, LemmaReport &report, const std::string &suffix) {
    const CVector &psi = s.psi();
    const double r2 = std::sqrt(2.0);
    auto p1 = [&](const CVector &v) { return r2 * s.apply_p(1, Outcome::plus, v); };
    const std::array<CVector, 5> projected{
        p1(psi),
        p1(s.apply_r(3, Outcome::plus, psi)),
        p1(s.apply_r(3, Outcome::minus, psi)),
        p1(s.apply_r(2, Outcome::plus, psi)),
        p1(s.apply_r(2, Outcome::minus, psi)),
    };
    const auto u = u_vectors();
    report.record("L2" + suffix, max_abs_diff(gram_matrix(projected), gram_matrix(u)));
}

// Lemma-7 Gram check on one block, extended by x1 -> (0, 1).
void block_gram_one_side(const MeasurementFamily &fam, const CVector &x0, const CVector &x1, LemmaReport &report,
                         const std::string &suffix) {
    const std::array<CVector, 6> local{
        x0,
        fam.op(3, Outcome::plus) * x0,
        fam.op(3, Outcome::minus) * x0,
        fam.op(2, Outcome::plus) * x0,
        fam.op(2, Outcome::minus) * x0,
        x1,
    };
    const auto u = u_vectors();
    const std::array<CVector, 6> reference{u[0], u[1], u[2], u[3], u[4], CVector{0.0, 1.0}};
    report.record("L7" + suffix, max_abs_diff(gram_matrix(local), gram_matrix(reference)));
}

void block_actions_one_side(const MeasurementFamily &fam, const CVector &x0, const CVector &x1,
                            LemmaReport &report) {
    const std::array<CVector, 2> frame{x0, x1};
    const CMatrix embed = CMatrix::from_columns(frame);
    double worst = 0.0;
    for (int index : kAllIndices) {
        for (Outcome x : kOutcomes) {
            const CMatrix expected = embed * ideal_local_projector(index, x) * embed.adjoint();
            for (const CVector &v : frame) {
                worst = std::max(worst, (fam.op(index, x) * v - expected * v).norm());
            }
        }
    }
    report.record("block_actions", worst);

    const CMatrix &p2 = fam.op(2, Outcome::plus);
    const CMatrix &p3 = fam.op(3, Outcome::plus);
    const CMatrix comm = p2 * p3 - p3 * p2;
    double comm_dev = 0.0;
    for (const CVector &v : frame) {
        comm_dev = std::max(comm_dev, std::abs((comm * v).norm() - 0.5 * v.norm()));
    }
    report.record("commutator", comm_dev);
}

void completion_identity_one_side(const Source &s, LemmaReport &report, const std::string &suffix) {
    const CVector &psi = s.psi();
    const double beta = block_beta();
    const CVector p1 = s.apply_p(1, Outcome::plus, psi);
    const CVector shifted = s.apply_p(2, Outcome::plus, p1) - (kCos * kCos) * p1;
    const CVector rhs =
        (2.0 * beta * beta) * (s.apply_r(2, Outcome::plus, shifted) - s.apply_r(3, Outcome::plus, shifted));
    report.record("completion_identity" + suffix, (s.apply_p(1, Outcome::minus, psi) - rhs).norm());
}

double inter_block_overlap(const std::vector<Block> &blocks) {
    double worst = 0.0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        for (std::size_t j = 0; j < blocks.size(); ++j) {
            if (i == j) {
                continue;
            }
            for (const CVector *u : {&blocks[i].a0, &blocks[i].a1}) {
                for (const CVector *v : {&blocks[j].a0, &blocks[j].a1}) {
                    worst = std::max(worst, std::abs(inner(*u, *v)));
                }
            }
            for (const CVector *u : {&blocks[i].b0, &blocks[i].b1}) {
                for (const CVector *v : {&blocks[j].b0, &blocks[j].b1}) {
                    worst = std::max(worst, std::abs(inner(*u, *v)));
                }
            }
        }
    }
    return worst;
}

// The x0 vectors come out of the Schmidt step exactly orthonormal; only the
// derived x1 vectors carry accumulated overlap.
void reorthogonalize(std::vector<Block> &blocks) {
    auto fix = [&](CVector Block::*zero, CVector Block::*one) {
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            CVector v = blocks[i].*one;
            for (std::size_t j = 0; j < blocks.size(); ++j) {
                v -= inner(blocks[j].*zero, v) * (blocks[j].*zero);
                if (j < i) {
                    v -= inner(blocks[j].*one, v) * (blocks[j].*one);
                }
            }
            blocks[i].*one = v.normalized();
        }
    };
    fix(&Block::a0, &Block::a1);
    fix(&Block::b0, &Block::b1);
}

double reconstruction_residual(const CVector &psi, const std::vector<Block> &blocks) {
    CVector recon(psi.dim());
    for (const Block &b : blocks) {
        recon += b.alpha * (tensor_vec(b.a0, b.b0) + tensor_vec(b.a1, b.b1));
    }
    return (psi - recon).norm();
}

Decomposition extract_blocks(const Source &s, const DecomposeOptions &options) {
    Decomposition d;
    d.diagnostics = LemmaReport(options.lemma_tol);
    const double beta = block_beta();
    const MeasurementFamily &p = s.p_family();
    const MeasurementFamily &r = s.r_family();

    const CVector p1 = s.apply_p(1, Outcome::plus, s.psi());
    const SchmidtResult schmidt = schmidt_decompose(p1, s.shape(), options.sigma_min);

    double invariant_dev = 0.0;
    for (std::size_t i = 0; i < schmidt.coefficients.size(); ++i) {
        Block b;
        b.alpha = schmidt.coefficients[i];
        b.a0 = schmidt.left_vectors[i];
        b.b0 = schmidt.right_vectors[i];
        b.a1 = beta * (p.op(3, Outcome::plus) * b.a0 - p.op(2, Outcome::plus) * b.a0);
        b.b1 = beta * (r.op(3, Outcome::plus) * b.b0 - r.op(2, Outcome::plus) * b.b0);
        for (const CVector *v : {&b.a0, &b.a1, &b.b0, &b.b1}) {
            invariant_dev = std::max(invariant_dev, std::abs(v->norm() - 1.0));
        }
        invariant_dev = std::max(invariant_dev, std::abs(inner(b.a0, b.a1)));
        invariant_dev = std::max(invariant_dev, std::abs(inner(b.b0, b.b1)));
        d.blocks.push_back(std::move(b));
    }
    d.diagnostics.record("block_invariants", invariant_dev);
    if (invariant_dev > options.block_tol) {
        throw StructuralError("block vectors are not orthonormal pairs (deviation " + sci(invariant_dev) + ")",
                              d.diagnostics);
    }

    d.corrected_overlap = inter_block_overlap(d.blocks);
    d.diagnostics.record("block_overlap", d.corrected_overlap);
    if (d.corrected_overlap > options.overlap_cutoff) {
        throw StructuralError("blocks overlap (" + sci(d.corrected_overlap) + ")", d.diagnostics);
    }
    reorthogonalize(d.blocks);

    d.residual = reconstruction_residual(s.psi(), d.blocks);
    d.diagnostics.record("residual", d.residual);
    const double bound = 10.0 * options.tol * std::sqrt(static_cast<double>(s.shape().joint_dim()));
    if (d.residual > bound) {
        throw StructuralError("reconstruction residual " + sci(d.residual) + " exceeds " + sci(bound),
                              d.diagnostics);
    }
    return d;
}

}  // namespace

double block_beta() { return 1.0 / (2.0 * kSin * kCos); }

std::array<CVector, 5> u_vectors() {
    const double c2 = kCos * kCos;
    const double s2 = kSin * kSin;
    const double sc = kSin * kCos;
    return {CVector{1.0, 0.0}, CVector{c2, sc}, CVector{s2, -sc}, CVector{c2, -sc}, CVector{s2, sc}};
}

void LemmaReport::record(const std::string &id, double deviation) {
    auto [it, inserted] = deviations_.emplace(id, deviation);
    if (!inserted) {
        it->second = std::max(it->second, deviation);
    }
}

void LemmaReport::merge(const LemmaReport &other) {
    for (const auto &[id, dev] : other.deviations_) {
        record(id, dev);
    }
}

double LemmaReport::deviation(const std::string &id) const {
    auto it = deviations_.find(id);
    if (it == deviations_.end()) {
        throw ContractError("lemma report has no entry '" + id + "'");
    }
    return it->second;
}

bool LemmaReport::all_pass() const {
    return std::all_of(deviations_.begin(), deviations_.end(),
                       [&](const auto &kv) { return kv.second <= tolerance_; });
}

PreconditionError::PreconditionError(CheckReport report)
    : std::runtime_error("source fails the self-checking test (max deviation " + sci(report.max_abs_dev) +
                         " > tolerance " + sci(report.tolerance) + ")"),
      report_(std::move(report)) {}

StructuralError::StructuralError(const std::string &what, LemmaReport diagnostics)
    : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}

LemmaReport verify_lemma_identities(const Source &s, double lemma_tol) {
    require_candidate(s, "verify_lemma_identities");
    LemmaReport report(lemma_tol);
    double l1 = 0.0;
    for (int index : kAllIndices) {
        for (Outcome x : kOutcomes) {
            l1 = std::max(l1, (s.apply_p(index, x, s.psi()) - s.apply_r(index, x, s.psi())).norm());
        }
    }
    report.record("L1", l1);
    lemma_identities_one_side(s, report, "");
    lemma_identities_one_side(s.swapped(), report, "_swapped");
    return report;
}

LemmaReport verify_isomorphism(const Source &s, const Decomposition &d, double lemma_tol) {
    require_candidate(s, "verify_isomorphism");
    LemmaReport report(lemma_tol);
    global_gram_one_side(s, report, "");
    global_gram_one_side(s.swapped(), report, "_swapped");
    // Recorded so an empty decomposition still yields the entries.
    report.record("L7", 0.0);
    report.record("L7_swapped", 0.0);
    for (const Block &b : d.blocks) {
        block_gram_one_side(s.r_family(), b.b0, b.b1, report, "");
        block_gram_one_side(s.p_family(), b.a0, b.a1, report, "_swapped");
    }
    return report;
}

LemmaReport verify_block_actions(const Source &s, const Decomposition &d, double lemma_tol) {
    require_candidate(s, "verify_block_actions");
    LemmaReport report(lemma_tol);
    report.record("block_actions", 0.0);
    report.record("commutator", 0.0);
    for (const Block &b : d.blocks) {
        block_actions_one_side(s.r_family(), b.b0, b.b1, report);
        block_actions_one_side(s.p_family(), b.a0, b.a1, report);
    }
    return report;
}

LemmaReport verify_completion(const Source &s, const Decomposition &d, double lemma_tol) {
    require_candidate(s, "verify_completion");
    LemmaReport report(lemma_tol);
    CVector tail(s.psi().dim());
    for (const Block &b : d.blocks) {
        tail += b.alpha * tensor_vec(b.a1, b.b1);
    }
    report.record("completion", (s.apply_p(1, Outcome::minus, s.psi()) - tail).norm());
    completion_identity_one_side(s, report, "");
    completion_identity_one_side(s.swapped(), report, "_swapped");
    report.record("orthogonality", inter_block_overlap(d.blocks));
    return report;
}

Decomposition decompose(const Source &s, const DecomposeOptions &options) {
    require_candidate(s, "decompose");
    CheckReport pre = check_self_checking(s, options.tol);
    if (!pre.pass) {
        throw PreconditionError(std::move(pre));
    }
    Decomposition d = extract_blocks(s, options);
    d.diagnostics.merge(verify_lemma_identities(s, options.lemma_tol));
    d.diagnostics.merge(verify_isomorphism(s, d, options.lemma_tol));
    d.diagnostics.merge(verify_block_actions(s, d, options.lemma_tol));
    d.diagnostics.merge(verify_completion(s, d, options.lemma_tol));
    return d;
}

LemmaReport diagnose(const Source &s, const DecomposeOptions &options) {
    require_candidate(s, "diagnose");
    LemmaReport report(options.lemma_tol);
    report.record("self_checking", check_self_checking(s, options.tol).max_abs_dev);
    report.merge(verify_lemma_identities(s, options.lemma_tol));
    try {
        const Decomposition d = extract_blocks(s, options);
        report.merge(d.diagnostics);
        report.merge(verify_isomorphism(s, d, options.lemma_tol));
        report.merge(verify_block_actions(s, d, options.lemma_tol));
        report.merge(verify_completion(s, d, options.lemma_tol));
    } catch (const StructuralError &e) {
        report.merge(e.diagnostics());
    }
    return report;
}

double commutator_norm(const CMatrix &p, const CMatrix &q) { return operator_norm(p * q - q * p); }

cd orthogonality_witness(const CVector &bi0, const CVector &bi1, const CVector &bj0, const CVector &bj1) {
    const CVector w = kCos * bj0 + kSin * bj1;
    const CVector w_prime = (-kSin) * bi0 + kCos * bi1;
    return inner(w, w_prime);
}

CMatrix block_sum_projector(const Decomposition &d, Factor side) {
    if (d.blocks.empty()) {
        return {};
    }
    const std::size_t dim = side == Factor::a ? d.blocks.front().a0.dim() : d.blocks.front().b0.dim();
    CMatrix m(dim, dim);
    for (const Block &b : d.blocks) {
        const CVector &x0 = side == Factor::a ? b.a0 : b.b0;
        const CVector &x1 = side == Factor::a ? b.a1 : b.b1;
        m += CMatrix::outer(x0, x0) + CMatrix::outer(x1, x1);
    }
    return m;
}

}  // namespace selfcheck
