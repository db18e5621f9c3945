#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dedupe/blocking.hpp"
#include "dedupe/error.hpp"
#include "dedupe/io.hpp"
#include "dedupe/rng.hpp"

namespace dedupe {

inline constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Blocking config JSON form.
// ---------------------------------------------------------------------------

inline std::string_view transform_name(KeyTransform t) {
    switch (t) {
        case KeyTransform::exact: return "exact";
        case KeyTransform::digits_only: return "digits_only";
        case KeyTransform::prefix: return "prefix";
        case KeyTransform::normalized_lower: return "normalized_lower";
    }
    return "unknown";
}

inline KeyTransform parse_transform(std::string_view name) {
    if (name == "exact") return KeyTransform::exact;
    if (name == "digits_only") return KeyTransform::digits_only;
    if (name == "prefix") return KeyTransform::prefix;
    if (name == "normalized_lower") return KeyTransform::normalized_lower;
    throw ConfigError("unknown blocking transform: " + std::string(name));
}

inline nlohmann::ordered_json blocking_config_to_json(const BlockingConfig& config) {
    nlohmann::ordered_json keys = nlohmann::ordered_json::array();
    for (const auto& k : config.keys) {
        nlohmann::ordered_json obj;
        obj["field"] = std::string(field_name(k.field));
        obj["transform"] = std::string(transform_name(k.transform));
        if (k.transform == KeyTransform::prefix) obj["k"] = k.prefix_len;
        keys.push_back(std::move(obj));
    }
    return {{"keys", keys}};
}

inline BlockingConfig blocking_config_from_json(const nlohmann::ordered_json& j) {
    BlockingConfig config;
    if (!j.contains("keys") || !j["keys"].is_array()) {
        throw ConfigError("blocking config: expected a 'keys' array");
    }
    for (const auto& obj : j["keys"]) {
        BlockingKey key;
        key.field = parse_field(obj.at("field").get<std::string>());
        key.transform = parse_transform(obj.value("transform", "exact"));
        if (obj.contains("k")) key.prefix_len = obj["k"].get<int>();
        config.keys.push_back(key);
    }
    validate_blocking_config(config);
    return config;
}

// ---------------------------------------------------------------------------
// Artifact writing with a manifest per stage.
//
// Outputs are staged as <path>.partial and renamed on commit, so a failed
// stage leaves only .partial files behind. The manifest records the tool
// version, seed, config echo, and content digests of every input and
// output, which the verify subcommand re-checks.
// ---------------------------------------------------------------------------

inline std::string content_digest(std::string_view bytes) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return std::string(buf);
}

inline std::string file_digest(const std::string& path) { return content_digest(read_file(path)); }

class StageWriter {
public:
    StageWriter(std::string subcommand, std::filesystem::path out_dir)
        : subcommand_(std::move(subcommand)), out_dir_(std::move(out_dir)) {
        std::error_code ec;
        std::filesystem::create_directories(out_dir_, ec);
        if (ec) throw IoError("cannot create output directory: " + out_dir_.string());
        manifest_["tool"] = "dedupe";
        manifest_["version"] = kToolVersion;
        manifest_["subcommand"] = subcommand_;
        manifest_["seed"] = 0;
        manifest_["config"] = nlohmann::ordered_json::object();
        manifest_["inputs"] = nlohmann::ordered_json::object();
        manifest_["outputs"] = nlohmann::ordered_json::object();
    }

    void set_seed(std::uint64_t seed) { manifest_["seed"] = seed; }
    void set_config(nlohmann::ordered_json config) { manifest_["config"] = std::move(config); }

    void record_input(const std::string& path) {
        manifest_["inputs"][path] = file_digest(path);
    }

    /// Stage an artifact; nothing is visible under its final name yet.
    void add(const std::string& filename, std::string_view content) {
        const std::filesystem::path final_path = out_dir_ / filename;
        write_file(final_path.string() + ".partial", content);
        staged_.push_back(final_path);
        manifest_["outputs"][final_path.string()] = content_digest(content);
    }

    std::filesystem::path path_of(const std::string& filename) const { return out_dir_ / filename; }

    /// Rename all staged artifacts into place and write the manifest.
    void commit() {
        for (const auto& path : staged_) {
            std::error_code ec;
            std::filesystem::rename(path.string() + ".partial", path, ec);
            if (ec) throw IoError("cannot finalize artifact: " + path.string());
        }
        staged_.clear();
        const std::filesystem::path manifest_path = out_dir_ / (subcommand_ + ".manifest.json");
        write_file(manifest_path.string(), manifest_.dump(2) + "\n");
    }

private:
    std::string subcommand_;
    std::filesystem::path out_dir_;
    nlohmann::ordered_json manifest_;
    std::vector<std::filesystem::path> staged_;
};

struct VerifyResult {
    std::vector<std::string> ok;
    std::vector<std::string> mismatched;
    std::vector<std::string> missing;
};

/// Re-digest every file named in a manifest.
inline VerifyResult verify_manifest(const std::string& manifest_path) {
    nlohmann::ordered_json manifest;
    try {
        manifest = nlohmann::ordered_json::parse(read_file(manifest_path));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("manifest: ") + e.what());
    }
    VerifyResult result;
    const auto check_section = [&](const char* section) {
        if (!manifest.contains(section)) return;
        for (const auto& [path, digest] : manifest[section].items()) {
            if (!std::filesystem::exists(path)) {
                result.missing.push_back(path);
            } else if (file_digest(path) != digest.get<std::string>()) {
                result.mismatched.push_back(path);
            } else {
                result.ok.push_back(path);
            }
        }
    };
    check_section("inputs");
    check_section("outputs");
    return result;
}

} // namespace dedupe
