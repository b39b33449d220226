#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "drlsim/mlp.hpp"

namespace drlsim::agents {

/// Checkpoint container. On disk: magic "DRLC", format version u32 LE,
/// metadata length u32 LE + UTF-8 JSON, then per tensor: rank u32, dims u32
/// each, row-major IEEE-754 f32 little-endian payload, until EOF.
struct Tensor {
    std::vector<std::uint32_t> dims;
    std::vector<float> data;
};

struct Checkpoint {
    nlohmann::json metadata;
    std::vector<Tensor> tensors;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path);

/// Throws CorruptCheckpointError (with byte offset) on bad magic, version,
/// or truncation; NotFoundError if the file cannot be opened.
Checkpoint load_checkpoint(const std::string& path);

/// MLP <-> tensor-list packing: per layer, weights [rows x cols] then bias
/// [rows].
void append_mlp(std::vector<Tensor>& tensors, const MlpParams& params);

/// Reads one MLP starting at `cursor` (advanced past it); validates shapes
/// against `arch`. Throws CorruptCheckpointError on mismatch.
MlpParams read_mlp(const std::vector<Tensor>& tensors, std::size_t& cursor,
                   const Architecture& arch);

}  // namespace drlsim::agents
