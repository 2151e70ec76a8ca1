// manifest.hpp: per-run bookkeeping written next to the outputs
#pragma once

#include "polaron/config.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>

namespace polaron {

// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t h);
std::uint64_t config_hash(const RunConfig& cfg);
std::string file_hash(const std::filesystem::path& path);

class Manifest {
public:
    Manifest(std::string verb, const RunConfig& cfg);

    void timing(const std::string& stage, double seconds);
    void check(const std::string& name, bool passed, double value, double threshold);
    void value(const std::string& key, nlohmann::json v);
    void input(const std::filesystem::path& path);
    void output(const std::filesystem::path& path);
    void set_exit_code(int code) { doc_["exit_code"] = code; }
    void set_error(const std::string& what) { doc_["error"] = what; }

    bool all_checks_passed() const;
    const nlohmann::json& json() const { return doc_; }

    // tmp file then rename
    void write(const std::filesystem::path& path) const;

private:
    nlohmann::json doc_;
};

// Wall-clock stage timer.
class StageTimer {
public:
    StageTimer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace polaron
