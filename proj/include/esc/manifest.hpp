#pragma once

// Run manifest: every produced file with its SHA-256.

#include "json.hpp"
#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace esc {

inline std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for hashing");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("SHA-256 init failed");
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        const auto got = in.gcount();
        if (got > 0 && EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(got)) != 1) {
            throw std::runtime_error("SHA-256 update failed");
        }
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) throw std::runtime_error("SHA-256 final failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

struct ManifestEntry {
    std::string file;
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct RunManifest {
    std::string scenario;
    std::string config_path;
    std::string output_dir;
    std::string determinism =
        "no random inputs; identical config and binary reproduce identical files and checksums";
    std::vector<ManifestEntry> files;

    /// Hashes the given files (relative to output_dir), sorted by name.
    void collect(const std::vector<std::string>& names) {
        files.clear();
        for (const auto& name : names) {
            const auto p = std::filesystem::path(output_dir) / name;
            files.push_back({name, sha256_file(p), std::filesystem::file_size(p)});
        }
        std::sort(files.begin(), files.end(),
                  [](const ManifestEntry& a, const ManifestEntry& b) { return a.file < b.file; });
    }

    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json j;
        j["scenario"] = scenario;
        j["config_path"] = config_path;
        j["output_dir"] = output_dir;
        j["determinism"] = determinism;
        j["files"] = nlohmann::json::array();
        for (const auto& f : files) j["files"].push_back({{"file", f.file}, {"sha256", f.sha256}, {"bytes", f.bytes}});
        return j;
    }

    void write(const std::filesystem::path& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write manifest '" + path.string() + "'");
        out << to_json().dump(2) << '\n';
    }
};

}  // namespace esc
