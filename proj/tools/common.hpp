// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "scalekit/error.hpp"
#include "scalekit/report.hpp"

namespace scalekit::cli {

// Exit codes: 0 success, 1 partial (some fits failed), 2 usage/config error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public Error {
public:
    using Error::Error;
};

/// Output directory for relative paths: $SCALEKIT_OUT_DIR when set, else cwd.
inline std::filesystem::path out_dir() {
    if (const char* env = std::getenv("SCALEKIT_OUT_DIR"); env && *env)
        return std::filesystem::path(env);
    return std::filesystem::current_path();
}

inline std::filesystem::path resolve_out(const std::string& path) {
    const std::filesystem::path p(path);
    return p.is_absolute() ? p : out_dir() / p;
}

/// Writes via a temp file and rename so interrupted runs never leave a
/// truncated output behind.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

struct ManifestBuilder {
    std::string command;
    std::string config_digest;
    std::vector<std::pair<std::string, std::string>> inputs;   // path, digest
    std::vector<std::pair<std::string, std::string>> outputs;  // path, digest
    nlohmann::json extra = nlohmann::json::object();

    void add_input(const std::filesystem::path& path, const std::string& content) {
        inputs.emplace_back(path.string(), content_digest(content));
    }
    void add_output(const std::filesystem::path& path, const std::string& content) {
        outputs.emplace_back(path.string(), content_digest(content));
    }

    void write(const std::filesystem::path& path) const {
        nlohmann::json j;
        j["command"] = command;
        j["config_digest"] = config_digest;
        nlohmann::json in = nlohmann::json::object(), out = nlohmann::json::object();
        for (const auto& [p, d] : inputs) in[p] = d;
        for (const auto& [p, d] : outputs) out[p] = d;
        j["inputs"] = in;
        j["outputs"] = out;
        j["tool_version"] = SCALEKIT_VERSION;
        j["timestamp"] = static_cast<long long>(
            std::chrono::duration_cast<std::chrono::seconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count());
        for (const auto& [k, v] : extra.items()) j[k] = v;
        atomic_write(path, j.dump(2) + "\n");
    }
};

inline std::filesystem::path manifest_path_for(const std::filesystem::path& primary) {
    std::filesystem::path p = primary;
    p.replace_extension();
    return p.string() + ".manifest.json";
}

}  // namespace scalekit::cli
