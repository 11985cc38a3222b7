#pragma once

// Run manifests: a small provenance record written atomically next to every
// CLI output. Reruns with identical inputs and seed produce byte-identical
// outputs, and the manifest captures the hashes needed to check that.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pulseforge/serialize.hpp"

namespace pulseforge {

inline constexpr const char* kVersion = "0.1.0";

inline std::uint64_t fnv1a_hash(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::uint64_t>> input_hashes;
    std::uint64_t seed = 0;
    std::string version = kVersion;
    std::vector<std::string> outputs;

    void add_input(const std::filesystem::path& path) {
        input_hashes.emplace_back(path.string(), fnv1a_hash(read_file(path)));
    }

    void add_input_text(const std::string& label, const std::string& text) {
        input_hashes.emplace_back(label, fnv1a_hash(text));
    }

    ojson to_json() const {
        ojson j;
        j["command"] = command;
        auto inputs = ojson::array();
        for (const auto& [name, hash] : input_hashes) {
            char buf[20];
            std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
            inputs.push_back(ojson{{"path", name}, {"fnv1a", buf}});
        }
        j["inputs"] = std::move(inputs);
        j["seed"] = seed;
        j["version"] = version;
        j["outputs"] = outputs;
        return j;
    }

    void write(const std::filesystem::path& path) const { write_file_atomic(path, stable_dump(to_json())); }
};

}  // namespace pulseforge
