#pragma once

#include <cstdint>
#include <filesystem>

#include "awnet/model/wnet.hpp"

namespace awnet {

// Single-file checkpoint: 8-byte magic "AWNETCKP", u32 format version,
// u64 JSON header length, JSON header (config, epoch, seed, tensor index),
// then raw little-endian float32 tensor data in index order. Parameters and
// batch-norm running statistics are keyed by their hierarchical names.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMeta {
    ModelConfig config;
    int epoch = 0;
    std::uint64_t seed = 0;
};

void save_checkpoint(const std::filesystem::path& path, AttentionWNet<float>& model, int epoch,
                     std::uint64_t seed);

// Reads the header only (cheap config inspection).
CheckpointMeta read_checkpoint_meta(const std::filesystem::path& path);

// Rebuilds the model from the stored config and loads every tensor. Throws
// IoError on malformed files or name/shape mismatches.
AttentionWNet<float> load_checkpoint(const std::filesystem::path& path, CheckpointMeta* meta = nullptr);

}  // namespace awnet
