#ifndef LMK_CHECKPOINT_HPP
#define LMK_CHECKPOINT_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lmk/nn.hpp"
#include "lmk/tensor.hpp"

namespace lmk::ckpt {

/// Single binary container: magic, little-endian u64 header length, JSON
/// header (format version, kind, step, config, tensor manifest, extra), then
/// raw double payloads in manifest order. Round trips are bitwise.
inline constexpr char kMagic[8] = {'L', 'M', 'K', 'C', 'K', 'P', 'T', '1'};
inline constexpr int kFormatVersion = 1;

void save(const std::string& path, const std::string& kind, const nlohmann::json& config,
          std::int64_t step, const nn::StateRefs& tensors, const nlohmann::json& extra);

struct Loaded {
    std::string kind;
    std::int64_t step = 0;
    nlohmann::json config;
    nlohmann::json extra;
    std::vector<std::string> order;
    std::unordered_map<std::string, Tensor> tensors;
};

Loaded load(const std::string& path);

/// Copy loaded tensors into `targets`; throws naming the first missing or
/// shape-mismatched tensor.
void restore_into(const Loaded& loaded, const nn::StateRefs& targets);

/// FNV-1a over the file bytes, as a hex string; used for provenance stamps.
std::string file_hash_hex(const std::string& path);

}  // namespace lmk::ckpt

#endif  // LMK_CHECKPOINT_HPP
