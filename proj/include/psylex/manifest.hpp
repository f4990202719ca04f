#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace psylex::manifest {

std::uint64_t fnv1a(const std::string& bytes);
std::string fnv1a_hex(const std::string& bytes);
std::string hash_file(const std::filesystem::path& path);

struct Manifest {
    std::string tool;
    std::string version;
    std::string subcommand;
    std::string config_json;  // effective configuration, serialized JSON object
    std::map<std::string, std::string> inputs;   // path as given -> content hash
    std::map<std::string, std::string> outputs;  // file name -> content hash
};

// Sorted-key JSON document; carries no timestamps so reruns are byte-identical.
void write(const std::filesystem::path& path, const Manifest& manifest);

}  // namespace psylex::manifest
