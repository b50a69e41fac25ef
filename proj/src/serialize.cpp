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

#include "selfcheck/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "selfcheck/errors.hpp"

namespace selfcheck {

namespace {

const char *kOutcomeKeys[2][2] = {{"++", "+-"}, {"-+", "--"}};

const Json &member(const Json &j, const char *key) {
    if (!j.is_object() || !j.contains(key)) {
        throw ValidationError(std::string("missing field '") + key + "'");
    }
    return j.at(key);
}

std::size_t positive_size(const Json &j, const char *key) {
    const Json &v = member(j, key);
    if (!v.is_number_integer() || v.get<long long>() <= 0) {
        throw ValidationError(std::string("field '") + key + "' must be a positive integer");
    }
    return v.get<std::size_t>();
}

Json family_to_json(const MeasurementFamily &fam) {
    Json out = Json::object();
    for (int index : kAllIndices) {
        if (!fam.has(index)) {
            continue;
        }
        out[std::to_string(index)] = {{"plus", matrix_to_json(fam.op(index, Outcome::plus))},
                                      {"minus", matrix_to_json(fam.op(index, Outcome::minus))}};
    }
    return out;
}

MeasurementFamily family_from_json(const Json &j, std::size_t dim, const char *side) {
    if (!j.is_object()) {
        throw ValidationError(std::string("field '") + side + "' must be an object");
    }
    std::array<std::optional<ProjectorPair>, 3> pairs;
    for (const auto &[key, value] : j.items()) {
        if (key != "1" && key != "2" && key != "3") {
            throw ValidationError(std::string("unknown measurement index '") + key + "' in '" + side + "'");
        }
        const int index = key[0] - '0';
        CMatrix plus = matrix_from_json(member(value, "plus"));
        CMatrix minus = matrix_from_json(member(value, "minus"));
        if (plus.rows() != dim || minus.rows() != dim) {
            throw ShapeError(std::string("measurement ") + key + " in '" + side + "' is not " + std::to_string(dim) +
                             "x" + std::to_string(dim));
        }
        pairs[index - 1] = ProjectorPair{Projector(std::move(plus)), Projector(std::move(minus))};
    }
    return MeasurementFamily(dim, std::move(pairs));
}

Json nullable(double v) { return std::isnan(v) ? Json(nullptr) : Json(v); }

}  // namespace

Json complex_to_json(cd z) { return Json::array({z.real(), z.imag()}); }

cd complex_from_json(const Json &j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ValidationError("complex numbers must be [re, im] pairs");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

Json vector_to_json(const CVector &v) {
    Json out = Json::array();
    for (const cd &z : v.entries()) {
        out.push_back(complex_to_json(z));
    }
    return out;
}

CVector vector_from_json(const Json &j) {
    if (!j.is_array()) {
        throw ValidationError("vectors must be arrays of [re, im] pairs");
    }
    CVector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        v[i] = complex_from_json(j[i]);
    }
    return v;
}

Json matrix_to_json(const CMatrix &m) {
    Json out = Json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) {
            row.push_back(complex_to_json(m(r, c)));
        }
        out.push_back(std::move(row));
    }
    return out;
}

CMatrix matrix_from_json(const Json &j) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        throw ValidationError("matrices must be non-empty nested arrays");
    }
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    std::vector<cd> entries;
    entries.reserve(rows * cols);
    for (const Json &row : j) {
        if (!row.is_array() || row.size() != cols) {
            throw ShapeError("matrix rows have unequal lengths");
        }
        for (const Json &z : row) {
            entries.push_back(complex_from_json(z));
        }
    }
    return CMatrix(rows, cols, std::move(entries));
}

Json source_to_json(const Source &s) {
    Json out;
    out["dim_a"] = s.shape().dim_a;
    out["dim_b"] = s.shape().dim_b;
    out["psi"] = vector_to_json(s.psi());
    out["p"] = family_to_json(s.p_family());
    out["r"] = family_to_json(s.r_family());
    return out;
}

Source source_from_json(const Json &j) {
    const BipartiteShape shape{positive_size(j, "dim_a"), positive_size(j, "dim_b")};
    CVector psi = vector_from_json(member(j, "psi"));
    return Source(shape, std::move(psi), family_from_json(member(j, "p"), shape.dim_a, "p"),
                  family_from_json(member(j, "r"), shape.dim_b, "r"));
}

Json table_to_json(const CorrelationTable &t) {
    Json out = Json::object();
    for (int alpha : t.indices()) {
        Json row = Json::object();
        for (int beta : t.indices()) {
            Json cell = Json::object();
            for (Outcome x : kOutcomes) {
                for (Outcome y : kOutcomes) {
                    cell[kOutcomeKeys[bit_of(x)][bit_of(y)]] = t.at(alpha, beta, x, y);
                }
            }
            row[std::to_string(beta)] = std::move(cell);
        }
        out[std::to_string(alpha)] = std::move(row);
    }
    return out;
}

CorrelationTable table_from_json(const Json &j) {
    if (!j.is_object()) {
        throw ValidationError("correlation table must be an object");
    }
    std::vector<int> indices;
    for (const auto &[key, value] : j.items()) {
        indices.push_back(std::stoi(key));
    }
    CorrelationTable t(indices);
    for (int alpha : t.indices()) {
        const Json &row = member(j, std::to_string(alpha).c_str());
        for (int beta : t.indices()) {
            const Json &cell = member(row, std::to_string(beta).c_str());
            for (Outcome x : kOutcomes) {
                for (Outcome y : kOutcomes) {
                    t.at(alpha, beta, x, y) = member(cell, kOutcomeKeys[bit_of(x)][bit_of(y)]).get<double>();
                }
            }
        }
    }
    return t;
}

Json report_to_json(const CheckReport &r) {
    Json out;
    out["mode"] = to_string(r.mode);
    out["tolerance"] = r.tolerance;
    out["max_abs_dev"] = r.max_abs_dev;
    out["verdict"] = r.pass ? "pass" : "fail";
    Json devs = Json::array();
    for (const Deviation &d : r.deviations) {
        Json e;
        e["kind"] = to_string(d.kind);
        e["alpha"] = d.kind == DeviationKind::marginal ? Json(nullptr) : Json(d.alpha);
        e["beta"] = d.beta;
        e["x"] = d.kind == DeviationKind::marginal ? Json(nullptr) : Json(std::string(1, outcome_char(d.x)));
        e["y"] = std::string(1, outcome_char(d.y));
        e["value"] = d.value;
        if (d.degenerate) {
            e["degenerate"] = true;
        }
        devs.push_back(std::move(e));
    }
    out["deviations"] = std::move(devs);
    out["sample_size"] = r.sample_size ? Json(*r.sample_size) : Json(nullptr);
    return out;
}

Json lemmas_to_json(const LemmaReport &r) {
    Json out = Json::object();
    for (const auto &[id, dev] : r.deviations()) {
        out[id] = {{"dev", dev}, {"pass", dev <= r.tolerance()}};
    }
    return out;
}

Json decomposition_to_json(const Decomposition &d) {
    Json out;
    out["residual"] = d.residual;
    Json blocks = Json::array();
    for (const Block &b : d.blocks) {
        blocks.push_back({{"alpha", complex_to_json(b.alpha)},
                          {"a0", vector_to_json(b.a0)},
                          {"a1", vector_to_json(b.a1)},
                          {"b0", vector_to_json(b.b0)},
                          {"b1", vector_to_json(b.b1)}});
    }
    out["blocks"] = std::move(blocks);
    out["lemmas"] = lemmas_to_json(d.diagnostics);
    out["lemma_tolerance"] = d.diagnostics.tolerance();
    return out;
}

Json stats_to_json(const ProtocolStats &stats, EveStrategy eve, std::uint64_t seed) {
    Json out;
    out["n"] = stats.n;
    out["sifted_count"] = stats.sifted_count;
    out["sift_fraction"] = nullable(stats.sift_fraction);
    out["qber"] = nullable(stats.qber);
    out["eve_information_fraction"] = nullable(stats.eve_information_fraction);
    out["strategy"] = to_string(eve);
    out["seed"] = seed;
    return out;
}

Json expected_stats_to_json(const ExpectedStats &stats, EveStrategy eve) {
    Json out;
    out["exact"] = true;
    out["sift_fraction"] = nullable(stats.sift_fraction);
    out["qber"] = nullable(stats.qber);
    out["eve_information_fraction"] = nullable(stats.eve_information_fraction);
    out["strategy"] = to_string(eve);
    return out;
}

std::string records_to_csv(const std::vector<TransmissionRecord> &records) {
    std::ostringstream os;
    os << "index,alice_button,alice_bit,bob_basis,bob_bit,sifted,error\n";
    for (const TransmissionRecord &r : records) {
        os << r.index << ',' << r.alice_button << ',' << r.alice_bit << ',' << r.bob_basis << ',' << r.bob_bit << ','
           << (r.sifted() ? 1 : 0) << ',' << (r.error() ? 1 : 0) << '\n';
    }
    return os.str();
}

Json manifest_entry_to_json(const GalleryEntry &entry, const std::string &source_file) {
    Json expected = Json::object();
    for (const auto &[test, verdict] : entry.expected) {
        expected[test] = to_string(verdict);
    }
    Json out;
    out["name"] = entry.name;
    out["source_file"] = source_file;
    out["expected"] = std::move(expected);
    out["seed"] = entry.seed ? Json(*entry.seed) : Json(nullptr);
    out["notes"] = entry.notes;
    return out;
}

Json parse_json_text(const std::string &text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what());
    }
}

Source load_source(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open source file '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return source_from_json(parse_json_text(buf.str()));
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError("malformed source file '" + path.string() + "': " + e.what());
    }
}

void write_file_atomic(const std::filesystem::path &path, const std::string &content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw ValidationError("cannot write '" + tmp.string() + "'");
        }
        out << content;
        if (!out) {
            throw ValidationError("write to '" + tmp.string() + "' failed");
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace selfcheck
