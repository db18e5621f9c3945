#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <sys/wait.h>

#include "dedupe/io.hpp"
#include "dedupe/pipeline.hpp"

using namespace dedupe;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(DEDUPE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (status < 0) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string run_cli_stdout(const std::string& args) {
    const fs::path tmp = fs::temp_directory_path() / "dedupe_cli_stdout.txt";
    const std::string cmd =
        std::string(DEDUPE_CLI_PATH) + " " + args + " >" + tmp.string() + " 2>/dev/null";
    REQUIRE(std::system(cmd.c_str()) == 0);
    const std::string out = read_file(tmp.string());
    fs::remove(tmp);
    return out;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("dedupe_pipeline_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string str(const std::string& name = "") const { return (path / name).string(); }
};

} // namespace

TEST_CASE("cli pipeline end to end") {
    TempDir dir;
    write_file(dir.str("gen.json"),
               R"({"n_clients": 3, "invoices_per_client": 300, "duplicate_fraction": 0.02, "seed": 11})");

    REQUIRE(run_cli("generate --config " + dir.str("gen.json") + " --out " + dir.str()) == 0);
    REQUIRE(fs::exists(dir.str("corpus.csv")));
    REQUIRE(fs::exists(dir.str("truth.csv")));
    REQUIRE(fs::exists(dir.str("generate.manifest.json")));

    REQUIRE(run_cli("clean --corpus " + dir.str("corpus.csv") + " --out " + dir.str()) == 0);
    REQUIRE(run_cli("pairs --corpus " + dir.str("cleaned.csv") + " --truth " +
                    dir.str("truth.csv") + " --out " + dir.str()) == 0);
    REQUIRE(run_cli("featurize --corpus " + dir.str("cleaned.csv") + " --pairs " +
                    dir.str("pairs.csv") + " --out " + dir.str()) == 0);
    REQUIRE(run_cli("train --model gbdt --features " + dir.str("features.jsonl") + " --schema " +
                    dir.str("schema.json") + " --seed 11 --config /dev/null --out " + dir.str()) ==
            2); // malformed config file
    REQUIRE(run_cli("train --model gbdt --features " + dir.str("features.jsonl") + " --schema " +
                    dir.str("schema.json") + " --seed 11 --out " + dir.str()) == 0);
    REQUIRE(run_cli("predict --model " + dir.str("gbdt.model.json") + " --features " +
                    dir.str("features.jsonl") + " --schema " + dir.str("schema.json") + " --out " +
                    dir.str()) == 0);
    REQUIRE(run_cli("evaluate --predictions " + dir.str("predictions.csv") + " --labels " +
                    dir.str("pairs.csv") + " --out " + dir.str()) == 0);
    CHECK(fs::exists(dir.str("report.json")));
    CHECK(fs::exists(dir.str("roc.csv")));
    CHECK(fs::exists(dir.str("pr.csv")));
    CHECK(fs::exists(dir.str("fbeta_1.csv")));
    CHECK(fs::exists(dir.str("fbeta_5.csv")));

    SECTION("rerun with the same seed is byte-identical") {
        const std::string corpus_before = read_file(dir.str("corpus.csv"));
        const std::string features_before = read_file(dir.str("features.jsonl"));
        REQUIRE(run_cli("generate --config " + dir.str("gen.json") + " --out " + dir.str()) == 0);
        REQUIRE(run_cli("featurize --corpus " + dir.str("cleaned.csv") + " --pairs " +
                        dir.str("pairs.csv") + " --out " + dir.str()) == 0);
        CHECK(read_file(dir.str("corpus.csv")) == corpus_before);
        CHECK(read_file(dir.str("features.jsonl")) == features_before);
    }

    SECTION("verify detects tampering") {
        REQUIRE(run_cli("verify --manifest " + dir.str("featurize.manifest.json")) == 0);
        std::string features = read_file(dir.str("features.jsonl"));
        features += "\n";
        write_file(dir.str("features.jsonl"), features);
        CHECK(run_cli("verify --manifest " + dir.str("featurize.manifest.json")) == 1);
    }

    SECTION("experiments run from the same artifacts") {
        REQUIRE(run_cli("crossval --features " + dir.str("features.jsonl") +
                        " --model gbdt --seed 11 --out " + dir.str("cv")) == 0);
        CHECK(fs::exists(dir.str("cv/report.json")));
        CHECK(fs::exists(dir.str("cv/mean_roc.csv")));
        const std::string report_before = read_file(dir.str("cv/report.json"));
        REQUIRE(run_cli("crossval --features " + dir.str("features.jsonl") +
                        " --model gbdt --seed 11 --out " + dir.str("cv")) == 0);
        CHECK(read_file(dir.str("cv/report.json")) == report_before);

        REQUIRE(run_cli("loco --features " + dir.str("features.jsonl") + " --corpus " +
                        dir.str("cleaned.csv") + " --model gbdt --seed 11 --out " +
                        dir.str("loco")) == 0);
        CHECK(fs::exists(dir.str("loco/report.json")));

        write_file(dir.str("nn.json"), R"({"epochs": 25, "batch_size": 16})");
        REQUIRE(run_cli("train --model nn --features " + dir.str("features.jsonl") +
                        " --config " + dir.str("nn.json") + " --schema " + dir.str("schema.json") +
                        " --seed 11 --out " + dir.str()) == 0);
        REQUIRE(run_cli("predict --model " + dir.str("nn.model.json") + " --features " +
                        dir.str("features.jsonl") + " --out " + dir.str("nnpred")) == 0);
        CHECK(fs::exists(dir.str("nnpred/predictions.csv")));

        write_file(dir.str("grid.json"), R"({"n_estimators": [10, 25], "max_depth": [2]})");
        REQUIRE(run_cli("gridscan --features " + dir.str("features.jsonl") + " --model gbdt" +
                        " --grid " + dir.str("grid.json") + " --seed 11 --out " +
                        dir.str("grid")) == 0);
        const auto grid = nlohmann::json::parse(read_file(dir.str("grid/gridscan.json")));
        CHECK(grid["table"].size() == 2);
    }
}

TEST_CASE("cli error handling") {
    TempDir dir;
    CHECK(run_cli("clean --corpus " + dir.str("missing.csv") + " --out " + dir.str()) == 2);
    CHECK(run_cli("pairs --out " + dir.str()) == 2);          // missing required option
    CHECK(run_cli("sim --metric soundex --a x --b y") == 2);  // unknown metric
    CHECK(run_cli("nosuchcommand") == 2);

    write_file(dir.str("garbage.jsonl"), "this is not jsonl\n");
    CHECK(run_cli("train --model gbdt --features " + dir.str("garbage.jsonl") + " --out " +
                  dir.str()) == 1);
}

TEST_CASE("sim subcommand prints scores") {
    const std::string out = run_cli_stdout("sim --metric jaro --a MARTHA --b MARHTA");
    CHECK(std::abs(std::stod(out) - 0.9444) < 1e-4);
    const std::string me =
        run_cli_stdout("sim --metric monge_elkan --inner levenshtein --a \"jan maartenssen\" "
                       "--b \"jan maartensen\"");
    CHECK(std::abs(std::stod(me) - 0.9545) < 1e-4);
}

TEST_CASE("stage writer keeps partial artifacts until commit") {
    TempDir dir;
    {
        StageWriter writer("demo", dir.str("stage"));
        writer.add("a.txt", "hello");
        CHECK(fs::exists(dir.str("stage/a.txt.partial")));
        CHECK_FALSE(fs::exists(dir.str("stage/a.txt")));
        // abandoned without commit: the partial file stays behind
    }
    CHECK(fs::exists(dir.str("stage/a.txt.partial")));
    CHECK_FALSE(fs::exists(dir.str("stage/demo.manifest.json")));

    StageWriter writer("demo", dir.str("stage"));
    writer.add("a.txt", "hello");
    writer.commit();
    CHECK(fs::exists(dir.str("stage/a.txt")));
    CHECK(fs::exists(dir.str("stage/demo.manifest.json")));
    CHECK(read_file(dir.str("stage/a.txt")) == "hello");

    const auto result = verify_manifest(dir.str("stage/demo.manifest.json"));
    CHECK(result.mismatched.empty());
    CHECK(result.missing.empty());
}

TEST_CASE("blocking config json round trip") {
    BlockingConfig config;
    config.keys.push_back({RecordField::supplier_id, KeyTransform::exact, 4});
    config.keys.push_back({RecordField::invoice_number, KeyTransform::digits_only, 4});
    config.keys.push_back({RecordField::supplier_name, KeyTransform::prefix, 6});
    const auto j = blocking_config_to_json(config);
    const auto parsed = blocking_config_from_json(j);
    REQUIRE(parsed.keys.size() == 3);
    CHECK(parsed.keys[2].transform == KeyTransform::prefix);
    CHECK(parsed.keys[2].prefix_len == 6);
    CHECK(blocking_config_to_json(parsed) == j);

    CHECK_THROWS_AS(blocking_config_from_json(nlohmann::ordered_json::object()), ConfigError);
}
