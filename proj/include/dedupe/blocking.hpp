#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "dedupe/core.hpp"
#include "dedupe/error.hpp"
#include "dedupe/text.hpp"

namespace dedupe {

// Value-equality blocking: records sharing a transformed key value land in
// the same block and only within-block pairs are compared downstream.

enum class KeyTransform {
    exact,
    digits_only,
    prefix,
    normalized_lower,
};

struct BlockingKey {
    RecordField field = RecordField::supplier_id;
    KeyTransform transform = KeyTransform::exact;
    int prefix_len = 4; // prefix transform only
};

struct BlockingConfig {
    std::vector<BlockingKey> keys;
};

/// supplier_id (exact), invoice_number (digits) and invoice_date (exact):
/// a perturbed duplicate keeps at least one of these with near certainty.
inline BlockingConfig default_blocking_config() {
    BlockingConfig cfg;
    cfg.keys.push_back({RecordField::supplier_id, KeyTransform::exact, 4});
    cfg.keys.push_back({RecordField::invoice_number, KeyTransform::digits_only, 4});
    cfg.keys.push_back({RecordField::invoice_date, KeyTransform::exact, 4});
    return cfg;
}

struct Block {
    std::string key_value;
    std::vector<std::int64_t> member_ids; // strictly increasing
};

inline std::string apply_transform(const std::string& value, const BlockingKey& key) {
    switch (key.transform) {
        case KeyTransform::exact: return value;
        case KeyTransform::digits_only: return digits_only(value);
        case KeyTransform::prefix: return utf8_prefix(value, static_cast<std::size_t>(key.prefix_len));
        case KeyTransform::normalized_lower: return ascii_lower(value);
    }
    throw ConfigError("unknown blocking transform");
}

inline void validate_blocking_config(const BlockingConfig& config) {
    if (config.keys.empty()) throw ConfigError("blocking config needs at least one key");
    for (const auto& k : config.keys) {
        if (k.transform == KeyTransform::prefix && k.prefix_len < 1) {
            throw ConfigError("blocking prefix length must be >= 1");
        }
    }
}

/// One block per (key definition, distinct transformed value). Blocks from
/// different keys are never merged; singletons are kept.
inline std::vector<Block> build_blocks(const std::vector<InvoiceRecord>& corpus,
                                       const BlockingConfig& config) {
    validate_blocking_config(config);
    std::vector<Block> blocks;
    for (const auto& key : config.keys) {
        std::map<std::string, std::vector<std::int64_t>> groups;
        for (const auto& r : corpus) {
            groups[apply_transform(field_text(r, key.field), key)].push_back(r.record_id);
        }
        for (auto& [value, ids] : groups) {
            std::sort(ids.begin(), ids.end());
            blocks.push_back(Block{value, std::move(ids)});
        }
    }
    return blocks;
}

/// Union of all within-block canonical pairs, deduplicated and sorted by
/// (left_id, right_id). Labels are left unassigned.
inline std::vector<CandidatePair> candidate_pairs(const std::vector<Block>& blocks) {
    std::vector<CandidatePair> pairs;
    for (const auto& block : blocks) {
        const auto& ids = block.member_ids;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            for (std::size_t j = i + 1; j < ids.size(); ++j) {
                pairs.push_back(canonicalize_pair(ids[i], ids[j]));
            }
        }
    }
    std::sort(pairs.begin(), pairs.end(), pair_id_less);
    pairs.erase(std::unique(pairs.begin(), pairs.end(),
                            [](const CandidatePair& a, const CandidatePair& b) {
                                return a.left_id == b.left_id && a.right_id == b.right_id;
                            }),
                pairs.end());
    return pairs;
}

/// Candidate pairs with blocking applied within each client partition, as
/// the per-client datasets of the validation protocols require. The union
/// is deduplicated and sorted like candidate_pairs output.
inline std::vector<CandidatePair> candidate_pairs_per_client(
    const std::vector<InvoiceRecord>& corpus, const BlockingConfig& config) {
    validate_blocking_config(config);
    std::map<std::string, std::vector<InvoiceRecord>> by_client;
    for (const auto& r : corpus) by_client[r.client_id].push_back(r);

    std::vector<CandidatePair> all;
    for (const auto& [client, records] : by_client) {
        const auto pairs = candidate_pairs(build_blocks(records, config));
        all.insert(all.end(), pairs.begin(), pairs.end());
    }
    std::sort(all.begin(), all.end(), pair_id_less);
    all.erase(std::unique(all.begin(), all.end(),
                          [](const CandidatePair& a, const CandidatePair& b) {
                              return a.left_id == b.left_id && a.right_id == b.right_id;
                          }),
              all.end());
    return all;
}

/// Fraction of the n(n-1)/2 exhaustive pairings that blocking avoided.
inline double pair_reduction_ratio(std::int64_t n_records, std::int64_t n_pairs) {
    if (n_records < 2) throw ConfigError("pair_reduction_ratio needs at least 2 records");
    const double total = static_cast<double>(n_records) * static_cast<double>(n_records - 1) / 2.0;
    return 1.0 - static_cast<double>(n_pairs) / total;
}

inline FeatureVector featurize(const CandidatePair& pair, const RecordIndex& corpus,
                               const FeatureSchema& schema) {
    validate_schema(schema);
    const auto left_it = corpus.find(pair.left_id);
    if (left_it == corpus.end()) {
        throw LookupError("record id not in corpus: " + std::to_string(pair.left_id));
    }
    const auto right_it = corpus.find(pair.right_id);
    if (right_it == corpus.end()) {
        throw LookupError("record id not in corpus: " + std::to_string(pair.right_id));
    }
    const InvoiceRecord& left = *left_it->second;
    const InvoiceRecord& right = *right_it->second;

    FeatureVector fv;
    fv.pair = pair;
    for (std::size_t i = 0; i < schema.entries.size(); ++i) {
        const auto& entry = schema.entries[i];
        fv.values[i] = evaluate_metric(entry.metric, field_text(left, entry.field),
                                       field_text(right, entry.field));
    }
    return fv;
}

/// Featurize a pair list. Per-pair work is pure, so extra threads simply
/// split the index range; output order never depends on scheduling.
inline std::vector<FeatureVector> featurize_pairs(const std::vector<CandidatePair>& pairs,
                                                  const RecordIndex& corpus,
                                                  const FeatureSchema& schema,
                                                  int threads = 1) {
    validate_schema(schema);
    std::vector<FeatureVector> out(pairs.size());
    if (threads < 1) threads = 1;
    threads = std::min<int>(threads, static_cast<int>(std::max<std::size_t>(pairs.size(), 1)));

    if (threads == 1) {
        for (std::size_t i = 0; i < pairs.size(); ++i) out[i] = featurize(pairs[i], corpus, schema);
        return out;
    }

    std::vector<std::thread> workers;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const std::size_t chunk = (pairs.size() + static_cast<std::size_t>(threads) - 1) /
                              static_cast<std::size_t>(threads);
    for (int t = 0; t < threads; ++t) {
        const std::size_t begin = static_cast<std::size_t>(t) * chunk;
        const std::size_t end = std::min(pairs.size(), begin + chunk);
        if (begin >= end) break;
        workers.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) {
                    out[i] = featurize(pairs[i], corpus, schema);
                }
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

} // namespace dedupe
