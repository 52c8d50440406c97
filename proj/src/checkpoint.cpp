#include "lmk/checkpoint.hpp"

#include <nlohmann/json.hpp>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "lmk/errors.hpp"

using nlohmann::json;

namespace lmk::ckpt {

void save(const std::string& path, const std::string& kind, const json& config,
          std::int64_t step, const nn::StateRefs& tensors, const json& extra) {
    json manifest = json::array();
    for (const auto& t : tensors)
        manifest.push_back({{"name", t.name}, {"shape", t.value->shape}});

    json header = {{"format_version", kFormatVersion},
                   {"kind", kind},
                   {"step", step},
                   {"config", config},
                   {"tensors", manifest},
                   {"extra", extra}};
    const std::string header_str = header.dump();

    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    out.write(kMagic, sizeof(kMagic));
    const std::uint64_t len = header_str.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
    for (const auto& t : tensors)
        out.write(reinterpret_cast<const char*>(t.value->ptr()),
                  static_cast<std::streamsize>(t.value->numel() * sizeof(double)));
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

Loaded load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifactError("checkpoint not found: " + path);
    char magic[sizeof(kMagic)];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw ConfigError("not a checkpoint file: " + path);
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string header_str(len, '\0');
    in.read(header_str.data(), static_cast<std::streamsize>(len));
    if (!in) throw ConfigError("truncated checkpoint header: " + path);

    json header = json::parse(header_str, nullptr, false);
    if (header.is_discarded()) throw ConfigError("corrupt checkpoint header: " + path);
    if (header.value("format_version", -1) != kFormatVersion)
        throw ConfigError("checkpoint format version mismatch in " + path + ": expected " +
                          std::to_string(kFormatVersion) + ", got " +
                          header["format_version"].dump());

    Loaded loaded;
    loaded.kind = header.value("kind", "");
    loaded.step = header.value("step", std::int64_t{0});
    loaded.config = header.value("config", json::object());
    loaded.extra = header.value("extra", json::object());
    for (const auto& entry : header["tensors"]) {
        const std::string name = entry["name"];
        Tensor t(entry["shape"].get<std::vector<int>>());
        in.read(reinterpret_cast<char*>(t.ptr()),
                static_cast<std::streamsize>(t.numel() * sizeof(double)));
        if (!in) throw ConfigError("truncated checkpoint payload at tensor " + name + ": " + path);
        loaded.order.push_back(name);
        loaded.tensors.emplace(name, std::move(t));
    }
    return loaded;
}

void restore_into(const Loaded& loaded, const nn::StateRefs& targets) {
    for (const auto& t : targets) {
        const auto it = loaded.tensors.find(t.name);
        if (it == loaded.tensors.end())
            throw ConfigError("checkpoint is missing tensor " + t.name);
        if (it->second.shape != t.value->shape)
            throw ConfigError("checkpoint shape mismatch for tensor " + t.name + ": file has " +
                              it->second.shape_str() + ", model expects " + t.value->shape_str());
        *t.value = it->second;
    }
}

std::string file_hash_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifactError("cannot hash missing file: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
    return std::string(out);
}

}  // namespace lmk::ckpt
