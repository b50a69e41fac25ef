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

#include "selfcheck/checker.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "selfcheck/errors.hpp"

namespace selfcheck {

namespace {

void finalize(CheckReport &report) {
    report.max_abs_dev = 0.0;
    for (const Deviation &d : report.deviations) {
        report.max_abs_dev = std::max(report.max_abs_dev, d.value);
    }
    report.pass = report.max_abs_dev <= report.tolerance;
}

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::string to_string(CheckMode mode) { return mode == CheckMode::exact ? "exact" : "empirical"; }

std::string to_string(DeviationKind kind) {
    switch (kind) {
        case DeviationKind::marginal:
            return "marginal";
        case DeviationKind::same_basis:
            return "same_basis";
        case DeviationKind::cross_basis:
            return "cross_basis";
        default:
            return "table";
    }
}

std::uint64_t pair_stream_seed(std::uint64_t seed, int alpha, int beta) {
    return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(alpha * 4 + beta));
}

CheckReport check_conjugate(const Source &s, double tol) {
    CheckReport report;
    report.mode = CheckMode::exact;
    report.tolerance = tol;
    for (int beta : {2, 3}) {
        for (Outcome y : kOutcomes) {
            const CVector projected = s.apply_p(beta, y, s.psi());
            const double mass = projected.norm_squared();
            report.deviations.push_back({DeviationKind::marginal, 0, beta, Outcome::plus, y, std::abs(mass - 0.5)});
            for (int alpha : {2, 3}) {
                for (Outcome x : kOutcomes) {
                    const bool same = alpha == beta;
                    const double target = same ? (x == y ? 1.0 : 0.0) : 0.5;
                    Deviation d{same ? DeviationKind::same_basis : DeviationKind::cross_basis, alpha, beta, x, y};
                    if (mass < kDegenerateMass) {
                        d.degenerate = true;
                        d.value = target;
                    } else {
                        const double conditional = s.apply_r(alpha, x, projected).norm_squared() / mass;
                        d.value = std::abs(conditional - target);
                    }
                    report.deviations.push_back(d);
                }
            }
        }
    }
    finalize(report);
    return report;
}

CheckReport check_self_checking(const Source &s, double tol) {
    if (s.kind() != SourceKind::self_checking_candidate) {
        throw ContractError("source has no measurement 1 on either factor; only check_conjugate applies");
    }
    const CorrelationTable actual = correlation_table(s);
    const CorrelationTable ideal = ideal_reference_table();
    CheckReport report;
    report.mode = CheckMode::exact;
    report.tolerance = tol;
    for (int alpha : kAllIndices) {
        for (int beta : kAllIndices) {
            for (Outcome x : kOutcomes) {
                for (Outcome y : kOutcomes) {
                    const double dev = std::abs(actual.at(alpha, beta, x, y) - ideal.at(alpha, beta, x, y));
                    report.deviations.push_back({DeviationKind::table, alpha, beta, x, y, dev});
                }
            }
        }
    }
    finalize(report);
    return report;
}

CheckReport empirical_check(const Source &s, std::uint64_t n_samples, std::uint64_t seed, double eps,
                            const std::vector<int> &indices) {
    if (n_samples == 0) {
        throw ContractError("empirical_check needs at least one sample");
    }
    std::vector<int> used = indices.empty() ? s.indices() : indices;
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    for (int i : used) {
        if (!s.p_family().has(i) || !s.r_family().has(i)) {
            throw ContractError("empirical_check: measurement " + std::to_string(i) + " is not present on the source");
        }
    }

    const CorrelationTable ideal = ideal_reference_table();
    CheckReport report;
    report.mode = CheckMode::empirical;
    report.tolerance = eps;
    report.sample_size = n_samples;
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    for (int alpha : used) {
        for (int beta : used) {
            // Born probabilities of the sequential measurement: y on A, then x on B.
            std::array<double, 2> p_y{};
            std::array<double, 2> p_x_plus_given_y{};
            for (Outcome y : kOutcomes) {
                const CVector branch = s.apply_p(beta, y, s.psi());
                const double mass = branch.norm_squared();
                p_y[bit_of(y)] = mass;
                p_x_plus_given_y[bit_of(y)] =
                    mass > 0.0 ? s.apply_r(alpha, Outcome::plus, branch).norm_squared() / mass : 0.0;
            }

            Rng rng(pair_stream_seed(seed, alpha, beta));
            std::array<std::uint64_t, 4> counts{};
            for (std::uint64_t k = 0; k < n_samples; ++k) {
                const int y = u01(rng) < p_y[0] ? 0 : 1;
                const int x = u01(rng) < p_x_plus_given_y[y] ? 0 : 1;
                ++counts[x * 2 + y];
            }
            for (Outcome x : kOutcomes) {
                for (Outcome y : kOutcomes) {
                    const double freq =
                        static_cast<double>(counts[bit_of(x) * 2 + bit_of(y)]) / static_cast<double>(n_samples);
                    report.deviations.push_back(
                        {DeviationKind::table, alpha, beta, x, y, std::abs(freq - ideal.at(alpha, beta, x, y))});
                }
            }
        }
    }
    finalize(report);
    return report;
}

}  // namespace selfcheck
