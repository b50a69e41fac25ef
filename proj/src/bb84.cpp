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

#include "selfcheck/bb84.hpp"

#include <cmath>
#include <limits>

#include "selfcheck/errors.hpp"

namespace selfcheck {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double snap(double p) {
    if (p < kBornSnap) {
        return 0.0;
    }
    if (p > 1.0 - kBornSnap) {
        return 1.0;
    }
    return p;
}

// Probability of outcome plus when measuring `rho` with the pair.
double born_plus(const MeasurementFamily &fam, int index, const CMatrix &rho) {
    return snap((fam.op(index, Outcome::plus) * rho).trace().real());
}

CMatrix lueders(const CMatrix &proj, const CMatrix &rho) {
    const CMatrix post = proj * rho * proj;
    const double p = post.trace().real();
    return (1.0 / p) * post;
}

void require_bb84_source(const Source &s, EveStrategy eve) {
    if (eve != EveStrategy::classical_clone) {
        return;
    }
    for (const MeasurementFamily *fam : {&s.p_family(), &s.r_family()}) {
        for (int index : {2, 3}) {
            for (Outcome x : kOutcomes) {
                const CMatrix &m = fam->op(index, x);
                for (std::size_t i = 0; i < m.rows(); ++i) {
                    for (std::size_t j = 0; j < m.cols(); ++j) {
                        if (i != j && std::abs(m(i, j)) > 1e-12) {
                            throw ContractError(
                                "classical-clone needs a source whose measurements are all diagonal in the "
                                "computational basis");
                        }
                    }
                }
            }
        }
    }
}

// The bit Eve attributes to computational state lambda for basis `button`.
int clone_bit(const Source &s, int button, std::size_t lambda) {
    return s.r_family().op(button, Outcome::plus)(lambda, lambda).real() > 0.5 ? 0 : 1;
}

}  // namespace

std::string to_string(EveStrategy e) {
    switch (e) {
        case EveStrategy::none:
            return "none";
        case EveStrategy::intercept_resend:
            return "intercept-resend";
        default:
            return "classical-clone";
    }
}

EveStrategy eve_strategy_from_string(const std::string &name) {
    if (name == "none") {
        return EveStrategy::none;
    }
    if (name == "intercept-resend") {
        return EveStrategy::intercept_resend;
    }
    if (name == "classical-clone") {
        return EveStrategy::classical_clone;
    }
    throw ValidationError("unknown eavesdropper strategy '" + name + "'");
}

ProtocolStats summarize(const std::vector<TransmissionRecord> &records) {
    ProtocolStats stats;
    stats.n = records.size();
    std::uint64_t known = 0;
    for (const TransmissionRecord &r : records) {
        if (!r.sifted()) {
            continue;
        }
        ++stats.sifted_count;
        stats.error_count += r.error() ? 1 : 0;
        known += r.eve_knows() ? 1 : 0;
    }
    if (stats.n == 0) {
        stats.sift_fraction = kNaN;
    } else {
        stats.sift_fraction = static_cast<double>(stats.sifted_count) / static_cast<double>(stats.n);
    }
    if (stats.sifted_count == 0) {
        stats.qber = kNaN;
        stats.eve_information_fraction = kNaN;
    } else {
        const auto sifted = static_cast<double>(stats.sifted_count);
        stats.qber = static_cast<double>(stats.error_count) / sifted;
        stats.eve_information_fraction = static_cast<double>(known) / sifted;
    }
    return stats;
}

ProtocolRun run_protocol(const Source &s, std::uint64_t n, EveStrategy eve, Rng &rng) {
    require_bb84_source(s, eve);
    std::uniform_int_distribution<int> basis(2, 3);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const MeasurementFamily &devices = s.r_family();

    ProtocolRun run;
    run.records.reserve(n);
    for (std::uint64_t k = 0; k < n; ++k) {
        TransmissionRecord rec;
        rec.index = k;
        rec.alice_button = basis(rng);
        const Emission em = emit(s, rec.alice_button, rng);
        rec.alice_bit = bit_of(em.outcome);
        CMatrix channel = em.normalized_density;

        if (eve == EveStrategy::intercept_resend) {
            const int eve_basis = basis(rng);
            const Outcome z = u01(rng) < born_plus(devices, eve_basis, channel) ? Outcome::plus : Outcome::minus;
            channel = lueders(devices.op(eve_basis, z), channel);
            rec.eve = EveLog{eve_basis, bit_of(z)};
        } else if (eve == EveStrategy::classical_clone) {
            double u = u01(rng);
            std::size_t lambda = 0;
            for (; lambda + 1 < channel.rows(); ++lambda) {
                u -= channel(lambda, lambda).real();
                if (u < 0.0) {
                    break;
                }
            }
            channel = CMatrix::outer(CVector::basis(channel.rows(), lambda), CVector::basis(channel.rows(), lambda));
            rec.eve = EveLog{rec.alice_button, clone_bit(s, rec.alice_button, lambda)};
        }

        rec.bob_basis = basis(rng);
        rec.bob_bit = u01(rng) < born_plus(devices, rec.bob_basis, channel) ? 0 : 1;
        run.records.push_back(rec);
    }
    run.stats = summarize(run.records);
    return run;
}

ExpectedStats exact_stats(const Source &s, EveStrategy eve) {
    require_bb84_source(s, eve);
    const MeasurementFamily &devices = s.r_family();
    double p_sift = 0.0;
    double p_error = 0.0;
    double p_known = 0.0;

    // Bob's half of the enumeration for one channel state of weight w.
    auto bob = [&](double w, int button, int bit, const CMatrix &channel, bool eve_known) {
        for (int bob_basis : {2, 3}) {
            const double p_plus = born_plus(devices, bob_basis, channel);
            for (int bob_bit : {0, 1}) {
                const double p = bob_bit == 0 ? p_plus : 1.0 - p_plus;
                const double weight = w * 0.5 * p;
                if (weight == 0.0 || bob_basis != button) {
                    continue;
                }
                p_sift += weight;
                if (bob_bit != bit) {
                    p_error += weight;
                }
                if (eve_known) {
                    p_known += weight;
                }
            }
        }
    };

    for (int button : {2, 3}) {
        for (Outcome x : kOutcomes) {
            const Emission em = emission_branch(s, button, x);
            const double w = 0.5 * em.probability;
            if (w == 0.0) {
                continue;
            }
            const int bit = bit_of(x);
            const CMatrix &rho = em.normalized_density;
            switch (eve) {
                case EveStrategy::none:
                    bob(w, button, bit, rho, false);
                    break;
                case EveStrategy::intercept_resend:
                    for (int eve_basis : {2, 3}) {
                        const double p_plus = born_plus(devices, eve_basis, rho);
                        for (Outcome z : kOutcomes) {
                            const double pz = z == Outcome::plus ? p_plus : 1.0 - p_plus;
                            if (pz == 0.0) {
                                continue;
                            }
                            bob(w * 0.5 * pz, button, bit, lueders(devices.op(eve_basis, z), rho),
                                eve_basis == button && bit_of(z) == bit);
                        }
                    }
                    break;
                case EveStrategy::classical_clone:
                    for (std::size_t lambda = 0; lambda < rho.rows(); ++lambda) {
                        const double pl = rho(lambda, lambda).real();
                        if (pl <= 0.0) {
                            continue;
                        }
                        const CVector e = CVector::basis(rho.rows(), lambda);
                        bob(w * pl, button, bit, CMatrix::outer(e, e), clone_bit(s, button, lambda) == bit);
                    }
                    break;
            }
        }
    }

    ExpectedStats out;
    out.sift_fraction = p_sift;
    out.qber = p_sift > 0.0 ? p_error / p_sift : kNaN;
    out.eve_information_fraction = p_sift > 0.0 ? p_known / p_sift : kNaN;
    return out;
}

}  // namespace selfcheck
