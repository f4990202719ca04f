#include "psylex/manifest.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "psylex/errors.hpp"

namespace psylex::manifest {

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string fnv1a_hex(const std::string& bytes) {
    static const char digits[] = "0123456789abcdef";
    std::uint64_t hash = fnv1a(bytes);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[hash & 0xf];
        hash >>= 4;
    }
    return out;
}

std::string hash_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return fnv1a_hex(buffer.str());
}

void write(const std::filesystem::path& path, const Manifest& manifest) {
    nlohmann::json doc;
    doc["tool"] = manifest.tool;
    doc["version"] = manifest.version;
    doc["subcommand"] = manifest.subcommand;
    try {
        doc["config"] = nlohmann::json::parse(manifest.config_json.empty()
                                                  ? std::string("{}")
                                                  : manifest.config_json);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("manifest config echo is not valid JSON: ") + e.what());
    }
    doc["inputs"] = manifest.inputs;
    doc["outputs"] = manifest.outputs;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << doc.dump(2) << "\n";
}

}  // namespace psylex::manifest
