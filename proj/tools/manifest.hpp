#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace fhl::cli {

inline constexpr const char* kVersion = "fhl 1.0.0";

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

struct RunManifest {
    std::string command;
    nlohmann::json parameters = nlohmann::json::object();
    /// Config text that replays the run with `fhl --config`.
    std::string replay_config;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    nlohmann::json results = nlohmann::json::object();
    double wall_seconds = 0.0;

    nlohmann::json to_json() const;
    /// Writes the manifest, hashing inputs and outputs at this moment.
    void write(const std::string& path) const;
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace fhl::cli
