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

// File formats. Complex numbers are [re, im]; matrices are row-major nested
// arrays; joint vectors are flat arrays in the A-major index convention.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "selfcheck/bb84.hpp"
#include "selfcheck/checker.hpp"
#include "selfcheck/decomposer.hpp"
#include "selfcheck/gallery.hpp"
#include "selfcheck/source.hpp"

namespace selfcheck {

using Json = nlohmann::ordered_json;

Json complex_to_json(cd z);
cd complex_from_json(const Json &j);
Json vector_to_json(const CVector &v);
CVector vector_from_json(const Json &j);
Json matrix_to_json(const CMatrix &m);
CMatrix matrix_from_json(const Json &j);

/// { "dim_a", "dim_b", "psi", "p": {"1": {"plus", "minus"}, ...}, "r": {...} }
Json source_to_json(const Source &s);
/// Throws ValidationError / ShapeError on malformed input.
Source source_from_json(const Json &j);

/// alpha -> beta -> {"++", "+-", "-+", "--"}
Json table_to_json(const CorrelationTable &t);
CorrelationTable table_from_json(const Json &j);

Json report_to_json(const CheckReport &r);
Json lemmas_to_json(const LemmaReport &r);
Json decomposition_to_json(const Decomposition &d);

Json stats_to_json(const ProtocolStats &stats, EveStrategy eve, std::uint64_t seed);
Json expected_stats_to_json(const ExpectedStats &stats, EveStrategy eve);
/// index,alice_button,alice_bit,bob_basis,bob_bit,sifted,error
std::string records_to_csv(const std::vector<TransmissionRecord> &records);

Json manifest_entry_to_json(const GalleryEntry &entry, const std::string &source_file);

Json parse_json_text(const std::string &text);
Source load_source(const std::filesystem::path &path);
/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path &path, const std::string &content);

}  // namespace selfcheck
