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

// BB84 quantum transmission and sifting driven by an arbitrary source.
//
// Alice presses button 2 or 3 of the source, keeps the outcome bit, and the
// emitted density goes to Bob, who measures it with his R_2 or R_3 device.
// Eve optionally sits on the channel. Reconciliation and privacy
// amplification are not simulated.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selfcheck/source.hpp"

namespace selfcheck {

enum class EveStrategy {
    none,
    /// Measure with a uniformly random R_2 / R_3 and forward the post-measurement state.
    intercept_resend,
    /// Read the hidden variable in the computational basis and forward it
    /// unchanged. Only meaningful for sources whose every projector is diagonal.
    classical_clone,
};

std::string to_string(EveStrategy e);
EveStrategy eve_strategy_from_string(const std::string &name);

/// Born probabilities within this of 0 or 1 are snapped to 0 or 1.
inline constexpr double kBornSnap = 1e-12;

struct EveLog {
    int basis = 0;
    int bit = 0;
};

struct TransmissionRecord {
    std::uint64_t index = 0;
    int alice_button = 2;
    int alice_bit = 0;
    int bob_basis = 2;
    int bob_bit = 0;
    std::optional<EveLog> eve;

    bool sifted() const { return alice_button == bob_basis; }
    bool error() const { return sifted() && alice_bit != bob_bit; }
    /// Eve measured in the announced basis and holds the correct bit.
    bool eve_knows() const { return eve && eve->basis == alice_button && eve->bit == alice_bit; }
};

/// Ratios are NaN when undefined (n = 0, or no sifted rounds).
struct ProtocolStats {
    std::uint64_t n = 0;
    std::uint64_t sifted_count = 0;
    std::uint64_t error_count = 0;
    double sift_fraction = 0.0;
    double qber = 0.0;
    double eve_information_fraction = 0.0;
};

struct ProtocolRun {
    std::vector<TransmissionRecord> records;
    ProtocolStats stats;
};

struct ExpectedStats {
    double sift_fraction = 0.0;
    double qber = 0.0;
    double eve_information_fraction = 0.0;
};

ProtocolStats summarize(const std::vector<TransmissionRecord> &records);

ProtocolRun run_protocol(const Source &s, std::uint64_t n, EveStrategy eve, Rng &rng);

/// Enumeration over every (button, bit, Eve branch, Bob basis, Bob bit)
/// branch weighted by its Born probability.
ExpectedStats exact_stats(const Source &s, EveStrategy eve);

}  // namespace selfcheck
