#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dedupe/error.hpp"
#include "dedupe/similarity.hpp"

namespace dedupe {

inline constexpr std::size_t kFeatureCount = 20;

/// One cleaned invoice. Amounts are integer minor units plus a currency
/// code; similarity treats the amount as its decimal digit string.
struct InvoiceRecord {
    std::int64_t record_id = 0;
    std::string client_id;
    std::string invoice_number;
    std::string invoice_date; // ISO-8601 yyyy-mm-dd
    std::string supplier_id;
    std::string supplier_name;
    std::int64_t amount_minor = 0;
    std::string currency;
    std::string description;

    bool operator==(const InvoiceRecord&) const = default;
};

enum class Label : int {
    non_duplicate = 0,
    duplicate = 1,
    unlabeled = -1,
};

/// Canonical unordered record pair: left_id < right_id always holds.
struct CandidatePair {
    std::int64_t left_id = 0;
    std::int64_t right_id = 0;
    Label label = Label::unlabeled;

    friend bool operator==(const CandidatePair& a, const CandidatePair& b) {
        return a.left_id == b.left_id && a.right_id == b.right_id && a.label == b.label;
    }
};

inline bool pair_id_less(const CandidatePair& a, const CandidatePair& b) {
    if (a.left_id != b.left_id) return a.left_id < b.left_id;
    return a.right_id < b.right_id;
}

inline CandidatePair canonicalize_pair(std::int64_t a, std::int64_t b) {
    if (a == b) throw SelfPairError("cannot pair record " + std::to_string(a) + " with itself");
    CandidatePair p;
    p.left_id = std::min(a, b);
    p.right_id = std::max(a, b);
    p.label = Label::unlabeled;
    return p;
}

/// 20 similarity scores for one candidate pair.
struct FeatureVector {
    CandidatePair pair;
    std::array<double, kFeatureCount> values{};

    int label01() const { return pair.label == Label::duplicate ? 1 : 0; }
};

// ---------------------------------------------------------------------------
// Record fields addressable by schema and blocking configuration.
// ---------------------------------------------------------------------------

enum class RecordField {
    client_id,
    invoice_number,
    invoice_date,
    supplier_id,
    supplier_name,
    amount_minor,
    currency,
    description,
};

inline std::string_view field_name(RecordField f) {
    switch (f) {
        case RecordField::client_id: return "client_id";
        case RecordField::invoice_number: return "invoice_number";
        case RecordField::invoice_date: return "invoice_date";
        case RecordField::supplier_id: return "supplier_id";
        case RecordField::supplier_name: return "supplier_name";
        case RecordField::amount_minor: return "amount_minor";
        case RecordField::currency: return "currency";
        case RecordField::description: return "description";
    }
    return "unknown";
}

inline RecordField parse_field(std::string_view name) {
    static const std::unordered_map<std::string_view, RecordField> table = {
        {"client_id", RecordField::client_id},
        {"invoice_number", RecordField::invoice_number},
        {"invoice_date", RecordField::invoice_date},
        {"supplier_id", RecordField::supplier_id},
        {"supplier_name", RecordField::supplier_name},
        {"amount_minor", RecordField::amount_minor},
        {"currency", RecordField::currency},
        {"description", RecordField::description},
    };
    const auto it = table.find(name);
    if (it == table.end()) throw ConfigError("unknown record field: " + std::string(name));
    return it->second;
}

/// Field value as the text that similarity metrics compare.
inline std::string field_text(const InvoiceRecord& r, RecordField f) {
    switch (f) {
        case RecordField::client_id: return r.client_id;
        case RecordField::invoice_number: return r.invoice_number;
        case RecordField::invoice_date: return r.invoice_date;
        case RecordField::supplier_id: return r.supplier_id;
        case RecordField::supplier_name: return r.supplier_name;
        case RecordField::amount_minor: return std::to_string(r.amount_minor);
        case RecordField::currency: return r.currency;
        case RecordField::description: return r.description;
    }
    throw ConfigError("unknown record field");
}

// ---------------------------------------------------------------------------
// Feature schema: the ordered field x metric combinations.
// ---------------------------------------------------------------------------

struct SchemaEntry {
    RecordField field = RecordField::invoice_number;
    MetricSpec metric;
};

struct FeatureSchema {
    std::vector<SchemaEntry> entries;
};

inline void validate_schema(const FeatureSchema& schema) {
    if (schema.entries.size() != kFeatureCount) {
        throw ConfigError("feature schema must have exactly " + std::to_string(kFeatureCount) +
                          " entries, got " + std::to_string(schema.entries.size()));
    }
    for (const auto& e : schema.entries) {
        if (e.metric.metric.kind == MetricKind::monge_elkan) {
            if (!e.metric.inner) throw ConfigError("monge_elkan schema entry lacks inner metric");
            if (e.metric.inner->kind == MetricKind::monge_elkan) {
                throw ConfigError("monge_elkan inner metric must be atomic");
            }
        }
    }
}

/// The fixed 20-feature mapping used throughout the toolkit. It pairs the
/// order-sensitive metrics with the identifier-like fields and the token
/// metrics with the free-text fields.
inline FeatureSchema default_schema() {
    FeatureSchema s;
    const auto atomic = [](MetricKind k, int n = 2) {
        AtomicMetric m;
        m.kind = k;
        m.ngram_n = n;
        return m;
    };
    const auto add = [&s](RecordField f, const AtomicMetric& m) {
        s.entries.push_back({f, MetricSpec{m, std::nullopt}});
    };
    const auto add_me = [&s, &atomic](RecordField f, MetricKind inner) {
        s.entries.push_back({f, MetricSpec{atomic(MetricKind::monge_elkan), atomic(inner)}});
    };

    add(RecordField::invoice_number, atomic(MetricKind::jaro));
    add(RecordField::invoice_number, atomic(MetricKind::jaro_winkler));
    add(RecordField::invoice_number, atomic(MetricKind::levenshtein));
    add(RecordField::invoice_number, atomic(MetricKind::damerau_levenshtein));
    add(RecordField::invoice_number, atomic(MetricKind::ngram, 2));
    add(RecordField::invoice_number, atomic(MetricKind::ngram, 3));
    add(RecordField::invoice_number, atomic(MetricKind::ngram, 4));
    add(RecordField::invoice_number, atomic(MetricKind::longest_common_substring));
    add(RecordField::invoice_number, atomic(MetricKind::binary));

    add(RecordField::supplier_name, atomic(MetricKind::jaro_winkler));
    add(RecordField::supplier_name, atomic(MetricKind::levenshtein));
    add(RecordField::supplier_name, atomic(MetricKind::ngram, 3));
    add_me(RecordField::supplier_name, MetricKind::jaro_winkler);

    add(RecordField::supplier_id, atomic(MetricKind::binary));
    add(RecordField::supplier_id, atomic(MetricKind::levenshtein));

    add(RecordField::invoice_date, atomic(MetricKind::binary));
    add(RecordField::invoice_date, atomic(MetricKind::levenshtein));

    add(RecordField::amount_minor, atomic(MetricKind::binary));
    add(RecordField::amount_minor, atomic(MetricKind::levenshtein));

    add_me(RecordField::description, MetricKind::levenshtein);

    validate_schema(s);
    return s;
}

/// Index from record id to record, shared by featurization and reporting.
using RecordIndex = std::unordered_map<std::int64_t, const InvoiceRecord*>;

inline RecordIndex index_records(const std::vector<InvoiceRecord>& records) {
    RecordIndex idx;
    idx.reserve(records.size());
    for (const auto& r : records) {
        if (!idx.emplace(r.record_id, &r).second) {
            throw FormatError("duplicate record_id in corpus: " + std::to_string(r.record_id));
        }
    }
    return idx;
}

} // namespace dedupe
