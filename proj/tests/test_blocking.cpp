#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "dedupe/blocking.hpp"
#include "dedupe/rng.hpp"

using namespace dedupe;

namespace {

InvoiceRecord make_record(std::int64_t id, std::string client, std::string number,
                          std::string date, std::string supplier) {
    InvoiceRecord r;
    r.record_id = id;
    r.client_id = std::move(client);
    r.invoice_number = std::move(number);
    r.invoice_date = std::move(date);
    r.supplier_id = std::move(supplier);
    r.supplier_name = "Supplier " + r.supplier_id;
    r.amount_minor = 1000 + id;
    r.currency = "GBP";
    r.description = "widget order";
    return r;
}

std::set<std::pair<std::int64_t, std::int64_t>> pair_set(const std::vector<CandidatePair>& ps) {
    std::set<std::pair<std::int64_t, std::int64_t>> out;
    for (const auto& p : ps) out.emplace(p.left_id, p.right_id);
    return out;
}

} // namespace

TEST_CASE("blocks group by shared transformed values") {
    // A,B share invoice_number digits; B,C share supplier_id
    const std::vector<InvoiceRecord> corpus = {
        make_record(1, "c1", "101", "2021-01-01", "S1"),
        make_record(2, "c1", "101", "2021-02-01", "S9"),
        make_record(3, "c1", "555", "2021-03-01", "S9"),
    };
    BlockingConfig cfg;
    cfg.keys.push_back({RecordField::invoice_number, KeyTransform::exact, 4});
    cfg.keys.push_back({RecordField::supplier_id, KeyTransform::exact, 4});

    const auto blocks = build_blocks(corpus, cfg);
    // 2 invoice_number blocks + 2 supplier blocks
    REQUIRE(blocks.size() == 4);
    const auto pairs = candidate_pairs(blocks);
    CHECK(pair_set(pairs) ==
          std::set<std::pair<std::int64_t, std::int64_t>>{{1, 2}, {2, 3}});
}

TEST_CASE("blocking edge cases") {
    CHECK(build_blocks({}, default_blocking_config()).empty());

    // all records share one supplier -> one block with all ids
    std::vector<InvoiceRecord> corpus;
    for (int i = 1; i <= 5; ++i) {
        corpus.push_back(make_record(i, "c1", std::to_string(100 + i), "2021-01-01", "SHARED"));
    }
    BlockingConfig cfg;
    cfg.keys.push_back({RecordField::supplier_id, KeyTransform::exact, 4});
    const auto blocks = build_blocks(corpus, cfg);
    REQUIRE(blocks.size() == 1);
    CHECK(blocks[0].member_ids == std::vector<std::int64_t>{1, 2, 3, 4, 5});

    BlockingConfig empty_cfg;
    CHECK_THROWS_AS(build_blocks(corpus, empty_cfg), ConfigError);
    BlockingConfig bad_prefix;
    bad_prefix.keys.push_back({RecordField::supplier_id, KeyTransform::prefix, 0});
    CHECK_THROWS_AS(build_blocks(corpus, bad_prefix), ConfigError);
}

TEST_CASE("key transforms") {
    BlockingKey digits{RecordField::invoice_number, KeyTransform::digits_only, 4};
    CHECK(apply_transform("INV-2021/0042", digits) == "20210042");
    BlockingKey pref{RecordField::supplier_name, KeyTransform::prefix, 3};
    CHECK(apply_transform("Northern Foundry", pref) == "Nor");
    BlockingKey lower{RecordField::supplier_name, KeyTransform::normalized_lower, 4};
    CHECK(apply_transform("ACME Ltd", lower) == "acme ltd");
}

TEST_CASE("candidate pairs deduplicate across keys and sort") {
    // same pair arises under two different keys
    const std::vector<InvoiceRecord> corpus = {
        make_record(4, "c1", "200", "2021-05-05", "S2"),
        make_record(2, "c1", "200", "2021-05-05", "S2"),
    };
    const auto pairs = candidate_pairs(build_blocks(corpus, default_blocking_config()));
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].left_id == 2);
    CHECK(pairs[0].right_id == 4);

    // singleton blocks yield nothing
    const std::vector<InvoiceRecord> singletons = {
        make_record(1, "c1", "1", "2021-01-01", "A"),
        make_record(2, "c1", "2", "2021-01-02", "B"),
    };
    CHECK(candidate_pairs(build_blocks(singletons, default_blocking_config())).empty());
}

TEST_CASE("blocking completeness against brute force") {
    Rng rng(555);
    std::vector<InvoiceRecord> corpus;
    for (int i = 1; i <= 200; ++i) {
        corpus.push_back(make_record(i, "c1", std::to_string(10 + rng.below(40)),
                                     "2021-01-0" + std::to_string(1 + rng.below(9)),
                                     "S" + std::to_string(rng.below(25))));
    }
    const auto cfg = default_blocking_config();
    const auto got = pair_set(candidate_pairs(build_blocks(corpus, cfg)));

    std::set<std::pair<std::int64_t, std::int64_t>> expected;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        for (std::size_t j = i + 1; j < corpus.size(); ++j) {
            bool shares = false;
            for (const auto& key : cfg.keys) {
                if (apply_transform(field_text(corpus[i], key.field), key) ==
                    apply_transform(field_text(corpus[j], key.field), key)) {
                    shares = true;
                    break;
                }
            }
            if (shares) {
                const auto p = canonicalize_pair(corpus[i].record_id, corpus[j].record_id);
                expected.emplace(p.left_id, p.right_id);
            }
        }
    }
    CHECK(got == expected);
}

TEST_CASE("per-client pairing never crosses clients") {
    std::vector<InvoiceRecord> corpus = {
        make_record(1, "c1", "100", "2021-01-01", "S1"),
        make_record(2, "c2", "100", "2021-01-01", "S1"), // same keys, other client
        make_record(3, "c1", "100", "2021-06-01", "S7"),
    };
    const auto pairs = candidate_pairs_per_client(corpus, default_blocking_config());
    CHECK(pair_set(pairs) == std::set<std::pair<std::int64_t, std::int64_t>>{{1, 3}});

    const auto global_pairs = candidate_pairs(build_blocks(corpus, default_blocking_config()));
    CHECK(global_pairs.size() == 3); // global blocking does cross clients
}

TEST_CASE("pair reduction ratio") {
    CHECK(pair_reduction_ratio(100, 4950) == 0.0);
    CHECK(pair_reduction_ratio(100, 0) == 1.0);
    CHECK(pair_reduction_ratio(4, 3) == 0.5);
    CHECK_THROWS_AS(pair_reduction_ratio(1, 0), ConfigError);
}

TEST_CASE("featurize basics") {
    const auto schema = default_schema();
    std::vector<InvoiceRecord> corpus = {
        make_record(1, "c1", "12345", "2021-01-01", "S1"),
        make_record(2, "c1", "12345", "2021-01-01", "S1"),
        make_record(3, "c1", "99999", "2022-09-09", "S3"),
    };
    corpus[1] = corpus[0];
    corpus[1].record_id = 2; // byte-identical except id
    const auto index = index_records(corpus);

    SECTION("identical records score 1 everywhere") {
        const auto fv = featurize(canonicalize_pair(1, 2), index, schema);
        for (const double v : fv.values) CHECK(v == 1.0);
        CHECK(fv.pair.left_id == 1);
    }

    SECTION("disjoint fields zero the binary features") {
        auto far = make_record(4, "c9", "00000", "1999-12-31", "ZZ");
        far.supplier_name = "qqqq";
        far.description = "zzzz";
        far.amount_minor = 77;
        std::vector<InvoiceRecord> two = {corpus[0], far};
        const auto idx2 = index_records(two);
        const auto fv = featurize(canonicalize_pair(1, 4), idx2, schema);
        for (std::size_t i = 0; i < schema.entries.size(); ++i) {
            if (schema.entries[i].metric.metric.kind == MetricKind::binary) {
                CHECK(fv.values[i] == 0.0);
            }
        }
    }

    SECTION("missing record id") {
        CHECK_THROWS_AS(featurize(canonicalize_pair(1, 99), index, schema), LookupError);
    }

    SECTION("deterministic and thread-count independent") {
        std::vector<CandidatePair> pairs = {canonicalize_pair(1, 2), canonicalize_pair(1, 3),
                                            canonicalize_pair(2, 3)};
        const auto seq = featurize_pairs(pairs, index, schema, 1);
        const auto par = featurize_pairs(pairs, index, schema, 4);
        REQUIRE(seq.size() == par.size());
        for (std::size_t i = 0; i < seq.size(); ++i) {
            CHECK(seq[i].values == par[i].values);
        }
    }
}
