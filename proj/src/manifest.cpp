#include "polaron/manifest.hpp"

#include "polaron/errors.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>

#ifndef POLARON_VERSION
#define POLARON_VERSION "unknown"
#endif

namespace polaron {

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::uint64_t config_hash(const RunConfig& cfg) {
    std::string canon;
    for (const auto& [k, v] : config_entries(cfg)) {
        if (k == "out_dir") continue;  // where results go does not change them
        canon += k + "=" + v + "\n";
    }
    return fnv1a(canon);
}

std::string file_hash(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("manifest: cannot hash " + path.string());
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return hex64(fnv1a(bytes));
}

Manifest::Manifest(std::string verb, const RunConfig& cfg) {
    doc_["verb"] = std::move(verb);
    doc_["code_version"] = POLARON_VERSION;
    nlohmann::json echo = nlohmann::json::object();
    for (const auto& [k, v] : config_entries(cfg)) echo[k] = v;
    doc_["config"] = echo;
    doc_["config_hash"] = hex64(config_hash(cfg));
    const char* threads = std::getenv("POLARON_THREADS");
    doc_["polaron_threads"] = threads ? threads : "";
    doc_["threads_used"] = 1;
    doc_["timings"] = nlohmann::json::object();
    doc_["checks"] = nlohmann::json::array();
    doc_["values"] = nlohmann::json::object();
    doc_["inputs"] = nlohmann::json::object();
    doc_["outputs"] = nlohmann::json::object();
}

void Manifest::timing(const std::string& stage, double seconds) { doc_["timings"][stage] = seconds; }

void Manifest::check(const std::string& name, bool passed, double value, double threshold) {
    doc_["checks"].push_back({{"name", name}, {"passed", passed}, {"value", value}, {"threshold", threshold}});
}

void Manifest::value(const std::string& key, nlohmann::json v) { doc_["values"][key] = std::move(v); }

void Manifest::input(const std::filesystem::path& path) { doc_["inputs"][path.filename().string()] = file_hash(path); }

void Manifest::output(const std::filesystem::path& path) { doc_["outputs"][path.filename().string()] = file_hash(path); }

bool Manifest::all_checks_passed() const {
    for (const auto& c : doc_["checks"]) {
        if (!c["passed"].get<bool>()) return false;
    }
    return true;
}

void Manifest::write(const std::filesystem::path& path) const {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw IoError("manifest: cannot write " + tmp.string());
        out << doc_.dump(2) << '\n';
        if (!out) throw IoError("manifest: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace polaron
