#include <catch2/catch_amalgamated.hpp>

#include "dedupe/core.hpp"
#include "dedupe/io.hpp"
#include "dedupe/rng.hpp"

using namespace dedupe;

namespace {

InvoiceRecord sample_record(std::int64_t id) {
    InvoiceRecord r;
    r.record_id = id;
    r.client_id = "client-1";
    r.invoice_number = "10023945";
    r.invoice_date = "2021-03-14";
    r.supplier_id = "C1-S00042";
    r.supplier_name = "Northern Foundry Ltd";
    r.amount_minor = 125999;
    r.currency = "GBP";
    r.description = "quarterly maintenance services";
    return r;
}

} // namespace

TEST_CASE("canonicalize_pair orders ids") {
    const auto p1 = canonicalize_pair(7, 3);
    CHECK(p1.left_id == 3);
    CHECK(p1.right_id == 7);
    const auto p2 = canonicalize_pair(3, 7);
    CHECK(p2.left_id == 3);
    CHECK(p2.right_id == 7);
    CHECK_THROWS_AS(canonicalize_pair(5, 5), SelfPairError);
}

TEST_CASE("default schema shape") {
    const auto schema = default_schema();
    REQUIRE(schema.entries.size() == kFeatureCount);
    CHECK(schema.entries[0].field == RecordField::invoice_number);
    CHECK(schema.entries[0].metric.metric.kind == MetricKind::jaro);

    // every entry evaluates without error on arbitrary strings
    for (const auto& e : schema.entries) {
        CHECK_NOTHROW(evaluate_metric(e.metric, "sample one", "sample two"));
    }

    // schema digest is stable and sensitive to content
    const auto digest = schema_digest(schema);
    CHECK(digest == schema_digest(default_schema()));
    auto other = schema;
    other.entries[2].field = RecordField::description;
    CHECK(digest != schema_digest(other));
}

TEST_CASE("field accessors") {
    const auto r = sample_record(9);
    CHECK(field_text(r, RecordField::amount_minor) == "125999");
    CHECK(field_text(r, RecordField::invoice_number) == "10023945");
    CHECK(parse_field("supplier_name") == RecordField::supplier_name);
    CHECK_THROWS_AS(parse_field("vat_number"), ConfigError);
}

TEST_CASE("corpus csv round trip") {
    std::vector<InvoiceRecord> records;
    records.push_back(sample_record(1));
    auto tricky = sample_record(2);
    tricky.supplier_name = "Quote \"Me\", Comma Ltd";
    tricky.description = "line\nbreak and, commas";
    records.push_back(tricky);
    auto unicode = sample_record(3);
    unicode.supplier_name = "Müller & Söhne";
    records.push_back(unicode);

    const std::string csv = corpus_to_csv(records);
    const auto parsed = corpus_from_csv(csv);
    REQUIRE(parsed.size() == records.size());
    CHECK(parsed == records);
    // byte-identical re-serialization
    CHECK(corpus_to_csv(parsed) == csv);
}

TEST_CASE("corpus csv rejects malformed input") {
    CHECK_THROWS_AS(corpus_from_csv(""), FormatError);
    CHECK_THROWS_AS(corpus_from_csv("wrong,header\n1,2\n"), FormatError);
    const std::string good = corpus_to_csv({sample_record(1)});
    CHECK_THROWS_AS(corpus_from_csv(good + "2,c,n,d,s,sn,notanumber,GBP,desc\n"), FormatError);
    CHECK_THROWS_AS(corpus_from_csv(good + "2,c,n,d,s,sn,-5,GBP,desc\n"), FormatError);
    // duplicate ids are caught at indexing time
    auto a = sample_record(4);
    auto b = sample_record(4);
    std::vector<InvoiceRecord> dup = {a, b};
    CHECK_THROWS_AS(index_records(dup), FormatError);
}

TEST_CASE("corpus csv round trips arbitrary field content") {
    Rng rng(9001);
    const std::vector<std::string> pool = {"a", "Z", "9", ",", "\"", "\n", "\r\n", " ",
                                           "é", "日", "';--", "\t"};
    std::vector<InvoiceRecord> records;
    for (int i = 0; i < 200; ++i) {
        auto r = sample_record(i + 1);
        const auto scramble = [&rng, &pool] {
            std::string s = "x"; // cleaned fields are never empty
            for (std::size_t k = rng.below(6); k > 0; --k) s += pool[rng.below(pool.size())];
            return s;
        };
        r.invoice_number = scramble();
        r.supplier_name = scramble();
        r.description = scramble();
        r.client_id = scramble();
        records.push_back(r);
    }
    const auto parsed = corpus_from_csv(corpus_to_csv(records));
    CHECK(parsed == records);
}

TEST_CASE("pairs csv round trip") {
    std::vector<CandidatePair> pairs;
    CandidatePair p1 = canonicalize_pair(1, 2);
    p1.label = Label::duplicate;
    CandidatePair p2 = canonicalize_pair(2, 9);
    p2.label = Label::non_duplicate;
    CandidatePair p3 = canonicalize_pair(4, 5);
    pairs = {p1, p2, p3};

    const auto csv = pairs_to_csv(pairs);
    const auto parsed = pairs_from_csv(csv);
    CHECK(parsed == pairs);
    CHECK_THROWS_AS(pairs_from_csv("left_id,right_id,label\n5,5,0\n"), FormatError);
    CHECK_THROWS_AS(pairs_from_csv("left_id,right_id,label\n1,2,7\n"), FormatError);
}

TEST_CASE("features jsonl round trip") {
    std::vector<FeatureVector> features;
    FeatureVector fv;
    fv.pair = canonicalize_pair(10, 20);
    fv.pair.label = Label::duplicate;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        fv.values[i] = static_cast<double>(i) / 19.0;
    }
    features.push_back(fv);
    fv.pair = canonicalize_pair(11, 21);
    fv.pair.label = Label::non_duplicate;
    fv.values[0] = 0.12345678901234567; // full precision survives
    features.push_back(fv);

    const auto jsonl = features_to_jsonl(features);
    const auto parsed = features_from_jsonl(jsonl);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].pair == features[0].pair);
    CHECK(parsed[0].values == features[0].values);
    CHECK(parsed[1].values == features[1].values);

    CHECK_THROWS_AS(features_from_jsonl("{\"left\":1}\n"), FormatError);
    CHECK_THROWS_AS(features_from_jsonl("not json\n"), FormatError);
    CHECK_THROWS_AS(
        features_from_jsonl("{\"left\":1,\"right\":2,\"label\":0,\"features\":[0.5]}\n"),
        FormatError);
}

TEST_CASE("schema json round trip") {
    const auto schema = default_schema();
    const auto j = schema_to_json(schema);
    const auto parsed = schema_from_json(j);
    REQUIRE(parsed.entries.size() == schema.entries.size());
    CHECK(schema_to_json(parsed) == j);
    CHECK(schema_digest(parsed) == schema_digest(schema));

    // metric params survive the trip
    CHECK(parsed.entries[4].metric.metric.ngram_n == 2);
    CHECK(parsed.entries[6].metric.metric.ngram_n == 4);
    REQUIRE(parsed.entries[19].metric.inner.has_value());
    CHECK(parsed.entries[19].metric.inner->kind == MetricKind::levenshtein);

    auto bad = j;
    bad[0]["metric"] = "soundex";
    CHECK_THROWS_AS(schema_from_json(bad), ParamError);
    auto short_schema = j;
    short_schema.erase(0);
    CHECK_THROWS_AS(schema_from_json(short_schema), ConfigError);
}

TEST_CASE("predictions csv round trip") {
    std::vector<Prediction> preds = {{1, 2, 0.12345678901234567}, {3, 4, 1e-12}};
    const auto csv = predictions_to_csv(preds);
    const auto parsed = predictions_from_csv(csv);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].probability == preds[0].probability);
    CHECK(parsed[1].probability == preds[1].probability);
}
