#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dedupe/blocking.hpp"
#include "dedupe/core.hpp"
#include "dedupe/error.hpp"
#include "dedupe/rng.hpp"
#include "dedupe/text.hpp"

namespace dedupe {

// Seeded synthetic multi-client invoice corpora with injected duplicates.
// Stands in for real invoice data; ground truth comes from construction
// instead of customer feedback.

enum class Perturbation {
    char_typo,
    adjacent_transposition,
    digit_change,
    date_shift_days,
    amount_scale,
    whitespace_noise,
    case_flip,
};

inline std::string_view perturbation_name(Perturbation p) {
    switch (p) {
        case Perturbation::char_typo: return "char_typo";
        case Perturbation::adjacent_transposition: return "adjacent_transposition";
        case Perturbation::digit_change: return "digit_change";
        case Perturbation::date_shift_days: return "date_shift_days";
        case Perturbation::amount_scale: return "amount_scale";
        case Perturbation::whitespace_noise: return "whitespace_noise";
        case Perturbation::case_flip: return "case_flip";
    }
    return "unknown";
}

inline Perturbation parse_perturbation(std::string_view name) {
    static const std::map<std::string_view, Perturbation> table = {
        {"char_typo", Perturbation::char_typo},
        {"adjacent_transposition", Perturbation::adjacent_transposition},
        {"digit_change", Perturbation::digit_change},
        {"date_shift_days", Perturbation::date_shift_days},
        {"amount_scale", Perturbation::amount_scale},
        {"whitespace_noise", Perturbation::whitespace_noise},
        {"case_flip", Perturbation::case_flip},
    };
    const auto it = table.find(name);
    if (it == table.end()) throw ConfigError("unknown perturbation: " + std::string(name));
    return it->second;
}

inline std::map<Perturbation, double> default_perturbation_weights() {
    return {
        {Perturbation::char_typo, 0.25},
        {Perturbation::adjacent_transposition, 0.15},
        {Perturbation::digit_change, 0.15},
        {Perturbation::date_shift_days, 0.15},
        {Perturbation::amount_scale, 0.10},
        {Perturbation::whitespace_noise, 0.10},
        {Perturbation::case_flip, 0.10},
    };
}

struct GenConfig {
    int n_clients = 5;
    int invoices_per_client = 2000;
    double duplicate_fraction = 0.01; // fraction of records that are perturbed copies
    std::map<Perturbation, double> perturbation_weights = default_perturbation_weights();
    double target_pair_imbalance = 100.0; // non-duplicate : duplicate candidate pairs
    double missing_field_fraction = 0.005;
    std::uint64_t seed = 42;
};

inline void validate_gen_config(const GenConfig& c) {
    if (c.n_clients < 1) throw ConfigError("datagen: n_clients must be >= 1");
    if (c.invoices_per_client < 2) throw ConfigError("datagen: invoices_per_client must be >= 2");
    if (c.duplicate_fraction < 0.0 || c.duplicate_fraction >= 1.0) {
        throw ConfigError("datagen: duplicate_fraction must be in [0, 1)");
    }
    if (c.perturbation_weights.empty()) throw ConfigError("datagen: no perturbation weights");
    double sum = 0.0;
    for (const auto& [p, w] : c.perturbation_weights) {
        if (w < 0.0 || w > 1.0) throw ConfigError("datagen: perturbation weights must be in [0, 1]");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("datagen: perturbation weights must sum to 1");
    if (!(c.target_pair_imbalance > 0.0)) {
        throw ConfigError("datagen: target_pair_imbalance must be > 0");
    }
    if (c.missing_field_fraction < 0.0 || c.missing_field_fraction > 0.5) {
        throw ConfigError("datagen: missing_field_fraction must be in [0, 0.5]");
    }
}

struct PerturbationEvent {
    std::int64_t original_id = 0;
    std::int64_t copy_id = 0;
    std::string kind;
    std::string field;
};

struct GroundTruth {
    std::vector<CandidatePair> pairs; // canonical, label = duplicate
    std::vector<PerturbationEvent> log;
};

// ---------------------------------------------------------------------------
// Dates as days since the civil epoch, via std::chrono calendar types.
// ---------------------------------------------------------------------------

inline std::string format_date(std::chrono::sys_days day) {
    const std::chrono::year_month_day ymd{day};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return std::string(buf);
}

inline std::chrono::sys_days parse_date(const std::string& iso) {
    int y = 0;
    unsigned m = 0, d = 0;
    if (std::sscanf(iso.c_str(), "%d-%u-%u", &y, &m, &d) != 3) {
        throw FormatError("bad ISO date: " + iso);
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) throw FormatError("bad ISO date: " + iso);
    return std::chrono::sys_days{ymd};
}

namespace detail {

inline const std::array<const char*, 48>& company_words() {
    static const std::array<const char*, 48> words = {
        "Northern", "Atlantic", "Crown",    "Summit",   "Harbor",  "Sterling", "Pioneer",
        "Cascade",  "Granite",  "Meridian", "Beacon",   "Orchard", "Falcon",   "Juniper",
        "Redwood",  "Lakeside", "Highland", "Keystone", "Vestige", "Monarch",  "Cobalt",
        "Ivory",    "Saffron",  "Thistle",  "Bramble",  "Foundry", "Anchor",   "Compass",
        "Quartz",   "Marble",   "Willow",   "Harvest",  "Drayton", "Elmwood",  "Foxglove",
        "Gables",   "Hartley",  "Ironside", "Jasper",   "Kendall", "Larkin",   "Mercer",
        "Norwood",  "Oakfield", "Paxton",   "Quimby",   "Rosewood", "Selwyn",
    };
    return words;
}

inline const std::array<const char*, 12>& company_suffixes() {
    static const std::array<const char*, 12> words = {
        "Ltd",      "Limited", "PLC",      "Group",    "Holdings", "Services",
        "Supplies", "Systems", "Partners", "Logistics", "Trading",  "Consulting",
    };
    return words;
}

inline const std::array<const char*, 40>& description_words() {
    static const std::array<const char*, 40> words = {
        "maintenance", "services",  "quarterly",  "annual",    "license",   "renewal",
        "consulting",  "hardware",  "software",   "support",   "delivery",  "freight",
        "catering",    "cleaning",  "equipment",  "rental",    "training",  "audit",
        "subscription", "utilities", "stationery", "printing",  "travel",    "lodging",
        "installation", "repair",    "inspection", "assembly",  "packaging", "storage",
        "marketing",   "design",    "research",   "analysis",  "materials", "components",
        "labour",      "overtime",  "insurance",  "brokerage",
    };
    return words;
}

struct ClientPools {
    std::vector<std::string> supplier_ids;
    std::vector<std::string> supplier_names;
};

inline std::string pick_supplier_name(Rng& rng) {
    const auto& words = company_words();
    const auto& suffixes = company_suffixes();
    std::string name = words[rng.below(words.size())];
    name += ' ';
    name += words[rng.below(words.size())];
    if (rng.unit() < 0.4) {
        name += ' ';
        name += words[rng.below(words.size())];
    }
    name += ' ';
    name += suffixes[rng.below(suffixes.size())];
    return name;
}

inline std::string pick_description(Rng& rng) {
    const auto& words = description_words();
    const int n = static_cast<int>(3 + rng.below(5));
    std::string out;
    for (int i = 0; i < n; ++i) {
        if (i > 0) out += ' ';
        out += words[rng.below(words.size())];
    }
    return out;
}

// Sizing derived from the imbalance target: non-duplicate candidate pairs
// come almost entirely from supplier and date collisions, so the pool
// sizes control the post-blocking class ratio.
struct CorpusSizing {
    std::size_t suppliers_per_client = 0;
    std::int64_t date_range_days = 0;
    int copies_per_client = 0;
};

inline CorpusSizing derive_sizing(const GenConfig& config) {
    CorpusSizing sizing;
    const double n = static_cast<double>(config.invoices_per_client);
    sizing.copies_per_client =
        static_cast<int>(std::llround(n * config.duplicate_fraction));

    double pair_budget; // target non-duplicate pairs per client
    if (sizing.copies_per_client > 0) {
        pair_budget = config.target_pair_imbalance * static_cast<double>(sizing.copies_per_client);
        const double max_pairs = n * (n - 1.0) / 2.0;
        if (pair_budget > max_pairs) {
            throw ConfigError("datagen: imbalance target infeasible for this corpus size");
        }
    } else {
        pair_budget = n; // no duplicates; keep blocking density moderate
    }
    // 55% of the budget from shared suppliers, 45% from shared dates.
    // Expected same-value pairs for a uniform pool of size S is n^2/(2S).
    sizing.suppliers_per_client =
        std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(n * n / (2.0 * 0.55 * pair_budget))));
    sizing.date_range_days =
        std::max<std::int64_t>(30, std::llround(n * n / (2.0 * 0.45 * pair_budget)));
    return sizing;
}

inline Perturbation sample_perturbation(Rng& rng, std::map<Perturbation, double>& remaining) {
    double total = 0.0;
    for (const auto& [p, w] : remaining) total += w;
    double u = rng.unit() * total;
    for (const auto& [p, w] : remaining) {
        u -= w;
        if (u <= 0.0) {
            const Perturbation chosen = p;
            remaining.erase(chosen);
            return chosen;
        }
    }
    const Perturbation last = remaining.rbegin()->first;
    remaining.erase(last);
    return last;
}

inline char random_other_digit(Rng& rng, char current) {
    char c;
    do {
        c = static_cast<char>('0' + rng.below(10));
    } while (c == current);
    return c;
}

inline char random_other_letter(Rng& rng, char current) {
    const bool upper = current >= 'A' && current <= 'Z';
    char c;
    do {
        c = static_cast<char>((upper ? 'A' : 'a') + rng.below(26));
    } while (c == current);
    return c;
}

inline void perturb_digit_change(Rng& rng, std::string& number) {
    const std::size_t pos = rng.below(number.size());
    number[pos] = random_other_digit(rng, number[pos]);
}

/// Applies one perturbation in place; returns the affected field name.
/// Every perturbation is guaranteed to change the record.
inline std::string apply_perturbation(Perturbation kind, InvoiceRecord& r, Rng& rng) {
    switch (kind) {
        case Perturbation::char_typo: {
            std::string& target = rng.unit() < 0.5 ? r.supplier_name : r.description;
            const bool is_name = &target == &r.supplier_name;
            std::vector<std::size_t> letters;
            for (std::size_t i = 0; i < target.size(); ++i) {
                const char c = target[i];
                if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) letters.push_back(i);
            }
            if (letters.empty()) {
                perturb_digit_change(rng, r.invoice_number);
                return "invoice_number";
            }
            const std::size_t pos = letters[rng.below(letters.size())];
            target[pos] = random_other_letter(rng, target[pos]);
            return is_name ? "supplier_name" : "description";
        }
        case Perturbation::adjacent_transposition: {
            std::vector<std::size_t> spots;
            for (std::size_t i = 0; i + 1 < r.invoice_number.size(); ++i) {
                if (r.invoice_number[i] != r.invoice_number[i + 1]) spots.push_back(i);
            }
            if (spots.empty()) {
                perturb_digit_change(rng, r.invoice_number);
            } else {
                const std::size_t i = spots[rng.below(spots.size())];
                std::swap(r.invoice_number[i], r.invoice_number[i + 1]);
            }
            return "invoice_number";
        }
        case Perturbation::digit_change:
            perturb_digit_change(rng, r.invoice_number);
            return "invoice_number";
        case Perturbation::date_shift_days: {
            const std::int64_t magnitude = 1 + static_cast<std::int64_t>(rng.below(3));
            const std::int64_t shift = rng.unit() < 0.5 ? -magnitude : magnitude;
            r.invoice_date = format_date(parse_date(r.invoice_date) + std::chrono::days{shift});
            return "invoice_date";
        }
        case Perturbation::amount_scale: {
            if (r.amount_minor % 10 == 0 && r.amount_minor >= 10 && rng.unit() < 0.5) {
                r.amount_minor /= 10;
            } else {
                r.amount_minor *= 10;
            }
            return "amount_minor";
        }
        case Perturbation::whitespace_noise: {
            std::vector<std::size_t> spaces;
            for (std::size_t i = 0; i < r.description.size(); ++i) {
                if (r.description[i] == ' ') spaces.push_back(i);
            }
            if (spaces.empty()) {
                r.description += ' ';
            } else {
                const std::size_t pos = spaces[rng.below(spaces.size())];
                r.description.insert(pos, 1, ' ');
            }
            return "description";
        }
        case Perturbation::case_flip: {
            std::vector<std::size_t> letters;
            for (std::size_t i = 0; i < r.supplier_name.size(); ++i) {
                const char c = r.supplier_name[i];
                if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) letters.push_back(i);
            }
            if (letters.empty()) {
                perturb_digit_change(rng, r.invoice_number);
                return "invoice_number";
            }
            const std::size_t pos = letters[rng.below(letters.size())];
            char& c = r.supplier_name[pos];
            c = (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A')
                                       : static_cast<char>(c - 'A' + 'a');
            return "supplier_name";
        }
    }
    throw ConfigError("unknown perturbation");
}

} // namespace detail

/// Deterministic corpus generation. Records carry one field blanked on a
/// small fraction of non-duplicate rows so that the cleaning stage has
/// something to remove.
inline std::pair<std::vector<InvoiceRecord>, GroundTruth> generate_corpus(const GenConfig& config) {
    validate_gen_config(config);
    const detail::CorpusSizing sizing = detail::derive_sizing(config);
    const std::chrono::sys_days date_base = parse_date("2017-01-06");
    const std::array<const char*, 3> currencies = {"GBP", "EUR", "USD"};

    std::vector<InvoiceRecord> records;
    GroundTruth truth;
    std::int64_t next_id = 1;

    for (int ci = 0; ci < config.n_clients; ++ci) {
        Rng rng(derive_seed(config.seed, "client:" + std::to_string(ci)));
        const std::string client_id = "client-" + std::to_string(ci + 1);
        const char* currency = currencies[static_cast<std::size_t>(ci) % currencies.size()];

        detail::ClientPools pools;
        pools.supplier_ids.reserve(sizing.suppliers_per_client);
        pools.supplier_names.reserve(sizing.suppliers_per_client);
        for (std::size_t s = 0; s < sizing.suppliers_per_client; ++s) {
            char idbuf[48];
            std::snprintf(idbuf, sizeof(idbuf), "C%d-S%05zu", ci + 1, s + 1);
            pools.supplier_ids.emplace_back(idbuf);
            pools.supplier_names.push_back(detail::pick_supplier_name(rng));
        }

        const int n_copies = sizing.copies_per_client;
        const int n_base = config.invoices_per_client - n_copies;
        const std::size_t first_base = records.size();

        for (int i = 0; i < n_base; ++i) {
            InvoiceRecord r;
            r.record_id = next_id++;
            r.client_id = client_id;
            r.invoice_number = std::to_string(rng.range(10000000, 99999999));
            r.invoice_date =
                format_date(date_base + std::chrono::days{static_cast<std::int64_t>(
                                            rng.below(static_cast<std::uint64_t>(sizing.date_range_days)))});
            const std::size_t s = rng.below(pools.supplier_ids.size());
            r.supplier_id = pools.supplier_ids[s];
            r.supplier_name = pools.supplier_names[s];
            r.amount_minor = rng.range(100, 5000000);
            r.currency = currency;
            r.description = detail::pick_description(rng);
            records.push_back(std::move(r));
        }

        const auto originals = rng.sample_indices(static_cast<std::size_t>(n_base),
                                                  static_cast<std::size_t>(n_copies));
        for (const std::size_t oi : originals) {
            const InvoiceRecord& original = records[first_base + oi];
            InvoiceRecord copy = original;
            copy.record_id = next_id++;

            const int n_perturbations = static_cast<int>(1 + rng.below(3));
            auto remaining = config.perturbation_weights;
            std::vector<Perturbation> chosen;
            for (int p = 0; p < n_perturbations && !remaining.empty(); ++p) {
                chosen.push_back(detail::sample_perturbation(rng, remaining));
            }
            std::sort(chosen.begin(), chosen.end()); // fixed application order
            for (const Perturbation kind : chosen) {
                const std::string field = detail::apply_perturbation(kind, copy, rng);
                truth.log.push_back({original.record_id, copy.record_id,
                                     std::string(perturbation_name(kind)), field});
            }

            CandidatePair pair = canonicalize_pair(original.record_id, copy.record_id);
            pair.label = Label::duplicate;
            truth.pairs.push_back(pair);
            records.push_back(std::move(copy));
        }
    }

    // Blank one field on a fraction of records that are not part of any
    // ground-truth pair, so cleaning never breaks the labeled data.
    const std::size_t n_blank = static_cast<std::size_t>(
        std::llround(config.missing_field_fraction * static_cast<double>(records.size())));
    if (n_blank > 0) {
        std::set<std::int64_t> protected_ids;
        for (const auto& p : truth.pairs) {
            protected_ids.insert(p.left_id);
            protected_ids.insert(p.right_id);
        }
        std::vector<std::size_t> eligible;
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (!protected_ids.count(records[i].record_id)) eligible.push_back(i);
        }
        Rng rng(derive_seed(config.seed, "blanking"));
        const auto picks = rng.sample_indices(eligible.size(), std::min(n_blank, eligible.size()));
        for (const std::size_t p : picks) {
            InvoiceRecord& r = records[eligible[p]];
            switch (rng.below(4)) {
                case 0: r.invoice_number.clear(); break;
                case 1: r.supplier_name.clear(); break;
                case 2: r.description.clear(); break;
                default: r.invoice_date.clear(); break;
            }
        }
    }

    std::sort(truth.pairs.begin(), truth.pairs.end(), pair_id_less);
    return {std::move(records), std::move(truth)};
}

// ---------------------------------------------------------------------------
// Cleaning and labeling.
// ---------------------------------------------------------------------------

struct CleanReport {
    std::size_t n_input = 0;
    std::size_t n_removed = 0;
    double removed_fraction = 0.0;
    bool warning = false; // removal above the 1% budget
};

inline bool has_missing_field(const InvoiceRecord& r) {
    return is_blank(r.client_id) || is_blank(r.invoice_number) || is_blank(r.invoice_date) ||
           is_blank(r.supplier_id) || is_blank(r.supplier_name) || is_blank(r.currency) ||
           is_blank(r.description);
}

inline std::pair<std::vector<InvoiceRecord>, CleanReport> clean_corpus(
    std::vector<InvoiceRecord> records) {
    CleanReport report;
    report.n_input = records.size();
    std::vector<InvoiceRecord> kept;
    kept.reserve(records.size());
    for (auto& r : records) {
        if (has_missing_field(r)) {
            ++report.n_removed;
        } else {
            kept.push_back(std::move(r));
        }
    }
    report.removed_fraction =
        report.n_input == 0 ? 0.0
                            : static_cast<double>(report.n_removed) / static_cast<double>(report.n_input);
    report.warning = report.removed_fraction >= 0.01;
    return {std::move(kept), report};
}

struct LabelReport {
    std::size_t truth_pairs = 0;
    std::size_t matched = 0; // truth pairs present in the candidate list
    double blocking_recall = 1.0;
};

/// Mark candidates as duplicate iff they appear in the ground truth; report
/// how many truth pairs the candidate list covers.
inline std::pair<std::vector<CandidatePair>, LabelReport> label_pairs(
    std::vector<CandidatePair> pairs, const std::vector<CandidatePair>& truth) {
    std::set<std::pair<std::int64_t, std::int64_t>> truth_set;
    for (const auto& t : truth) truth_set.emplace(t.left_id, t.right_id);

    std::size_t matched = 0;
    for (auto& p : pairs) {
        if (truth_set.count({p.left_id, p.right_id})) {
            p.label = Label::duplicate;
            ++matched;
        } else {
            p.label = Label::non_duplicate;
        }
    }
    LabelReport report;
    report.truth_pairs = truth_set.size();
    report.matched = matched;
    report.blocking_recall =
        truth_set.empty() ? 1.0 : static_cast<double>(matched) / static_cast<double>(truth_set.size());
    return {std::move(pairs), report};
}

// ---------------------------------------------------------------------------
// Generation report: what the downstream pipeline will see.
// ---------------------------------------------------------------------------

struct GenReport {
    std::size_t n_records = 0;
    std::size_t n_truth_pairs = 0;
    std::size_t n_cleaned_records = 0;
    std::size_t n_removed_records = 0;
    std::size_t n_candidate_pairs = 0;
    std::size_t n_duplicate_candidates = 0;
    std::size_t n_truth_viable = 0; // truth pairs with both records surviving cleaning
    double blocking_recall = 1.0;
    double achieved_imbalance = 0.0;
    double pair_reduction = 0.0;
};

/// Per-client candidate pairs under the default blocking config, labeled
/// against the truth that survives cleaning.
inline GenReport generate_report(const std::vector<InvoiceRecord>& records,
                                 const GroundTruth& truth) {
    GenReport report;
    report.n_records = records.size();
    report.n_truth_pairs = truth.pairs.size();

    auto [cleaned, clean_rep] = clean_corpus(records);
    report.n_cleaned_records = cleaned.size();
    report.n_removed_records = clean_rep.n_removed;

    std::set<std::int64_t> kept_ids;
    for (const auto& r : cleaned) kept_ids.insert(r.record_id);
    std::vector<CandidatePair> viable_truth;
    for (const auto& p : truth.pairs) {
        if (kept_ids.count(p.left_id) && kept_ids.count(p.right_id)) viable_truth.push_back(p);
    }
    report.n_truth_viable = viable_truth.size();

    const auto pairs = candidate_pairs_per_client(cleaned, default_blocking_config());
    auto [labeled, label_rep] = label_pairs(pairs, viable_truth);
    report.n_candidate_pairs = labeled.size();
    report.n_duplicate_candidates = label_rep.matched;
    report.blocking_recall = label_rep.blocking_recall;
    const std::size_t non_dup = labeled.size() - label_rep.matched;
    report.achieved_imbalance =
        label_rep.matched == 0 ? 0.0
                               : static_cast<double>(non_dup) / static_cast<double>(label_rep.matched);
    if (cleaned.size() >= 2) {
        report.pair_reduction = pair_reduction_ratio(static_cast<std::int64_t>(cleaned.size()),
                                                     static_cast<std::int64_t>(labeled.size()));
    }
    return report;
}

// ---------------------------------------------------------------------------
// JSON config and report forms.
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json gen_config_to_json(const GenConfig& c) {
    nlohmann::ordered_json weights = nlohmann::ordered_json::object();
    for (const auto& [p, w] : c.perturbation_weights) {
        weights[std::string(perturbation_name(p))] = w;
    }
    return {{"n_clients", c.n_clients},
            {"invoices_per_client", c.invoices_per_client},
            {"duplicate_fraction", c.duplicate_fraction},
            {"perturbation_weights", weights},
            {"target_pair_imbalance", c.target_pair_imbalance},
            {"missing_field_fraction", c.missing_field_fraction},
            {"seed", c.seed}};
}

inline GenConfig gen_config_from_json(const nlohmann::ordered_json& j) {
    GenConfig c;
    if (j.contains("n_clients")) c.n_clients = j["n_clients"].get<int>();
    if (j.contains("invoices_per_client")) c.invoices_per_client = j["invoices_per_client"].get<int>();
    if (j.contains("duplicate_fraction")) c.duplicate_fraction = j["duplicate_fraction"].get<double>();
    if (j.contains("perturbation_weights")) {
        c.perturbation_weights.clear();
        for (const auto& [name, w] : j["perturbation_weights"].items()) {
            c.perturbation_weights[parse_perturbation(name)] = w.get<double>();
        }
    }
    if (j.contains("target_pair_imbalance")) {
        c.target_pair_imbalance = j["target_pair_imbalance"].get<double>();
    }
    if (j.contains("missing_field_fraction")) {
        c.missing_field_fraction = j["missing_field_fraction"].get<double>();
    }
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    validate_gen_config(c);
    return c;
}

inline nlohmann::ordered_json gen_report_to_json(const GenReport& r) {
    return {{"n_records", r.n_records},
            {"n_truth_pairs", r.n_truth_pairs},
            {"n_cleaned_records", r.n_cleaned_records},
            {"n_removed_records", r.n_removed_records},
            {"n_candidate_pairs", r.n_candidate_pairs},
            {"n_duplicate_candidates", r.n_duplicate_candidates},
            {"n_truth_viable", r.n_truth_viable},
            {"blocking_recall", r.blocking_recall},
            {"achieved_imbalance", r.achieved_imbalance},
            {"pair_reduction", r.pair_reduction}};
}

} // namespace dedupe
