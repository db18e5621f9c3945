#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dedupe/core.hpp"
#include "dedupe/csv.hpp"
#include "dedupe/error.hpp"
#include "dedupe/rng.hpp"

namespace dedupe {

using json = nlohmann::ordered_json;

inline const std::vector<std::string> kCorpusHeader = {
    "record_id", "client_id", "invoice_number", "invoice_date",
    "supplier_id", "supplier_name", "amount_minor", "currency", "description"};

inline std::int64_t parse_int64(std::string_view s, std::string_view what) {
    std::int64_t v = 0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw FormatError("invalid integer for " + std::string(what) + ": '" + std::string(s) + "'");
    }
    return v;
}

// ---------------------------------------------------------------------------
// Corpus CSV
// ---------------------------------------------------------------------------

inline std::string corpus_to_csv(const std::vector<InvoiceRecord>& records) {
    std::string out;
    append_csv_row(out, kCorpusHeader);
    for (const auto& r : records) {
        append_csv_row(out, {std::to_string(r.record_id), r.client_id, r.invoice_number,
                             r.invoice_date, r.supplier_id, r.supplier_name,
                             std::to_string(r.amount_minor), r.currency, r.description});
    }
    return out;
}

inline std::vector<InvoiceRecord> corpus_from_csv(std::string_view text) {
    const auto rows = parse_csv(text);
    if (rows.empty()) throw FormatError("corpus csv: missing header");
    if (rows.front() != kCorpusHeader) throw FormatError("corpus csv: unexpected header");
    std::vector<InvoiceRecord> records;
    records.reserve(rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != kCorpusHeader.size()) {
            throw FormatError("corpus csv: row " + std::to_string(i) + " has " +
                              std::to_string(row.size()) + " fields");
        }
        InvoiceRecord r;
        r.record_id = parse_int64(row[0], "record_id");
        r.client_id = row[1];
        r.invoice_number = row[2];
        r.invoice_date = row[3];
        r.supplier_id = row[4];
        r.supplier_name = row[5];
        r.amount_minor = parse_int64(row[6], "amount_minor");
        if (r.amount_minor < 0) throw FormatError("corpus csv: negative amount_minor");
        r.currency = row[7];
        r.description = row[8];
        records.push_back(std::move(r));
    }
    return records;
}

// ---------------------------------------------------------------------------
// Candidate pair CSV: left_id,right_id,label with label in {-1, 0, 1}.
// ---------------------------------------------------------------------------

inline std::string pairs_to_csv(const std::vector<CandidatePair>& pairs) {
    std::string out = "left_id,right_id,label\n";
    for (const auto& p : pairs) {
        out += std::to_string(p.left_id);
        out.push_back(',');
        out += std::to_string(p.right_id);
        out.push_back(',');
        out += std::to_string(static_cast<int>(p.label));
        out.push_back('\n');
    }
    return out;
}

inline std::vector<CandidatePair> pairs_from_csv(std::string_view text) {
    const auto rows = parse_csv(text);
    if (rows.empty() || rows.front() != std::vector<std::string>{"left_id", "right_id", "label"}) {
        throw FormatError("pairs csv: unexpected header");
    }
    std::vector<CandidatePair> pairs;
    pairs.reserve(rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != 3) throw FormatError("pairs csv: malformed row " + std::to_string(i));
        CandidatePair p;
        p.left_id = parse_int64(row[0], "left_id");
        p.right_id = parse_int64(row[1], "right_id");
        if (p.left_id >= p.right_id) throw FormatError("pairs csv: pair not canonical");
        const auto lab = parse_int64(row[2], "label");
        if (lab != -1 && lab != 0 && lab != 1) throw FormatError("pairs csv: label must be -1, 0 or 1");
        p.label = static_cast<Label>(lab);
        pairs.push_back(p);
    }
    return pairs;
}

/// Ground-truth CSV is id pairs only (all rows are duplicates by definition).
inline std::string truth_to_csv(const std::vector<CandidatePair>& pairs) {
    std::string out = "left_id,right_id\n";
    for (const auto& p : pairs) {
        out += std::to_string(p.left_id);
        out.push_back(',');
        out += std::to_string(p.right_id);
        out.push_back('\n');
    }
    return out;
}

inline std::vector<CandidatePair> truth_from_csv(std::string_view text) {
    const auto rows = parse_csv(text);
    if (rows.empty() || rows.front() != std::vector<std::string>{"left_id", "right_id"}) {
        throw FormatError("truth csv: unexpected header");
    }
    std::vector<CandidatePair> pairs;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != 2) throw FormatError("truth csv: malformed row " + std::to_string(i));
        CandidatePair p = canonicalize_pair(parse_int64(row[0], "left_id"),
                                            parse_int64(row[1], "right_id"));
        p.label = Label::duplicate;
        pairs.push_back(p);
    }
    return pairs;
}

// ---------------------------------------------------------------------------
// Feature vectors: JSON lines, one object per pair.
// ---------------------------------------------------------------------------

inline std::string features_to_jsonl(const std::vector<FeatureVector>& features) {
    std::string out;
    for (const auto& fv : features) {
        json obj;
        obj["left"] = fv.pair.left_id;
        obj["right"] = fv.pair.right_id;
        obj["label"] = static_cast<int>(fv.pair.label);
        obj["features"] = fv.values;
        out += obj.dump();
        out.push_back('\n');
    }
    return out;
}

inline std::vector<FeatureVector> features_from_jsonl(std::string_view text) {
    std::vector<FeatureVector> out;
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (line.empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw FormatError("features jsonl line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!obj.contains("left") || !obj.contains("right") || !obj.contains("label") ||
            !obj.contains("features")) {
            throw FormatError("features jsonl line " + std::to_string(line_no) + ": missing keys");
        }
        FeatureVector fv;
        fv.pair.left_id = obj["left"].get<std::int64_t>();
        fv.pair.right_id = obj["right"].get<std::int64_t>();
        const int lab = obj["label"].get<int>();
        if (lab != -1 && lab != 0 && lab != 1) {
            throw FormatError("features jsonl line " + std::to_string(line_no) + ": bad label");
        }
        fv.pair.label = static_cast<Label>(lab);
        const auto& arr = obj["features"];
        if (!arr.is_array() || arr.size() != kFeatureCount) {
            throw FormatError("features jsonl line " + std::to_string(line_no) +
                              ": features must be an array of " + std::to_string(kFeatureCount));
        }
        for (std::size_t i = 0; i < kFeatureCount; ++i) fv.values[i] = arr[i].get<double>();
        out.push_back(fv);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Feature schema JSON
// ---------------------------------------------------------------------------

inline json atomic_params_to_json(const AtomicMetric& m) {
    json params = json::object();
    switch (m.kind) {
        case MetricKind::ngram:
            params["n"] = m.ngram_n;
            break;
        case MetricKind::jaro_winkler:
            params["prefix_weight"] = m.prefix_weight;
            params["max_prefix"] = m.max_prefix;
            break;
        case MetricKind::smith_waterman:
            params["match_score"] = m.sw.match_score;
            params["mismatch_penalty"] = m.sw.mismatch_penalty;
            params["gap_penalty"] = m.sw.gap_penalty;
            break;
        default:
            break;
    }
    return params;
}

inline AtomicMetric atomic_from_json(MetricKind kind, const json& params) {
    AtomicMetric m;
    m.kind = kind;
    switch (kind) {
        case MetricKind::ngram:
            if (!params.contains("n")) throw FormatError("schema: ngram metric needs params.n");
            m.ngram_n = params["n"].get<int>();
            break;
        case MetricKind::jaro_winkler:
            if (params.contains("prefix_weight")) m.prefix_weight = params["prefix_weight"].get<double>();
            if (params.contains("max_prefix")) m.max_prefix = params["max_prefix"].get<int>();
            break;
        case MetricKind::smith_waterman:
            if (params.contains("match_score")) m.sw.match_score = params["match_score"].get<int>();
            if (params.contains("mismatch_penalty")) m.sw.mismatch_penalty = params["mismatch_penalty"].get<int>();
            if (params.contains("gap_penalty")) m.sw.gap_penalty = params["gap_penalty"].get<int>();
            break;
        default:
            break;
    }
    return m;
}

inline json schema_to_json(const FeatureSchema& schema) {
    json arr = json::array();
    for (const auto& e : schema.entries) {
        json obj;
        obj["field"] = std::string(field_name(e.field));
        obj["metric"] = std::string(metric_name(e.metric.metric.kind));
        json params = atomic_params_to_json(e.metric.metric);
        if (e.metric.metric.kind == MetricKind::monge_elkan && e.metric.inner) {
            params["inner"] = std::string(metric_name(e.metric.inner->kind));
            params["inner_params"] = atomic_params_to_json(*e.metric.inner);
        }
        obj["params"] = params;
        arr.push_back(obj);
    }
    return arr;
}

inline FeatureSchema schema_from_json(const json& arr) {
    if (!arr.is_array()) throw FormatError("schema json: expected an array");
    FeatureSchema schema;
    for (const auto& obj : arr) {
        if (!obj.contains("field") || !obj.contains("metric")) {
            throw FormatError("schema json: entry missing field or metric");
        }
        SchemaEntry e;
        e.field = parse_field(obj["field"].get<std::string>());
        const MetricKind kind = parse_metric_kind(obj["metric"].get<std::string>());
        const json params = obj.contains("params") ? obj["params"] : json::object();
        if (kind == MetricKind::monge_elkan) {
            if (!params.contains("inner")) throw FormatError("schema json: monge_elkan needs params.inner");
            const MetricKind inner_kind = parse_metric_kind(params["inner"].get<std::string>());
            const json inner_params =
                params.contains("inner_params") ? params["inner_params"] : json::object();
            AtomicMetric outer;
            outer.kind = MetricKind::monge_elkan;
            e.metric = MetricSpec{outer, atomic_from_json(inner_kind, inner_params)};
        } else {
            e.metric = MetricSpec{atomic_from_json(kind, params), std::nullopt};
        }
        schema.entries.push_back(e);
    }
    validate_schema(schema);
    return schema;
}

/// Digest used to bind trained models to the schema that produced their
/// training features.
inline std::string schema_digest(const FeatureSchema& schema) {
    const std::string canonical = schema_to_json(schema).dump();
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical)));
    return std::string(buf);
}

// ---------------------------------------------------------------------------
// Prediction CSV
// ---------------------------------------------------------------------------

struct Prediction {
    std::int64_t left_id = 0;
    std::int64_t right_id = 0;
    double probability = 0.0;
};

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

inline std::string predictions_to_csv(const std::vector<Prediction>& preds) {
    std::string out = "left_id,right_id,probability\n";
    for (const auto& p : preds) {
        out += std::to_string(p.left_id);
        out.push_back(',');
        out += std::to_string(p.right_id);
        out.push_back(',');
        out += format_double(p.probability);
        out.push_back('\n');
    }
    return out;
}

inline std::vector<Prediction> predictions_from_csv(std::string_view text) {
    const auto rows = parse_csv(text);
    if (rows.empty() ||
        rows.front() != std::vector<std::string>{"left_id", "right_id", "probability"}) {
        throw FormatError("predictions csv: unexpected header");
    }
    std::vector<Prediction> preds;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != 3) throw FormatError("predictions csv: malformed row " + std::to_string(i));
        Prediction p;
        p.left_id = parse_int64(row[0], "left_id");
        p.right_id = parse_int64(row[1], "right_id");
        try {
            p.probability = std::stod(row[2]);
        } catch (const std::exception&) {
            throw FormatError("predictions csv: bad probability in row " + std::to_string(i));
        }
        preds.push_back(p);
    }
    return preds;
}

// ---------------------------------------------------------------------------
// Whole-file helpers
// ---------------------------------------------------------------------------

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("file not found: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed: " + path);
}

} // namespace dedupe
