#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "awnet/data/image.hpp"
#include "awnet/tensor.hpp"

namespace awnet {

inline constexpr int kPatchSize = 48;

struct PatchOrigin {
    int source = 0;  // index into PatchSet::sources
    int row = 0;     // top-left in padded coordinates
    int col = 0;
};

struct PatchSource {
    std::string id;
    int orig_h = 0, orig_w = 0;
    int padded_h = 0, padded_w = 0;
};

// Materialised patch batch. origins are row-major over each source grid.
struct PatchSet {
    int patch = kPatchSize;
    Tensor<float> patches;  // N x 1 x patch x patch
    Tensor<float> labels;   // N x 1 x patch x patch, empty when no labels
    std::vector<PatchOrigin> origins;
    std::vector<PatchSource> sources;

    int count() const { return patches.n(); }
    bool has_labels() const { return !labels.empty(); }
    void append(const PatchSet& other);
};

// Full-cover grid: the image is reflect-padded on the bottom/right until
// (dim - size) is a multiple of stride, then origins step row-major.
struct PatchGrid {
    int rows = 0, cols = 0;
    int padded_h = 0, padded_w = 0;
    std::vector<std::pair<int, int>> origins;  // (row, col)
    int count() const { return rows * cols; }
};
PatchGrid patch_grid(int h, int w, int size, int stride);

// Reflect (mirror, no edge duplication) padding on the bottom/right edges.
ImageF pad_reflect(const ImageF& img, int padded_h, int padded_w);

// Copies one size x size window out of a padded plane.
void copy_patch(const ImageF& padded, int row, int col, int size, float* dst);

PatchSet extract_patches(const ImageF& image, const ImageF* label, const std::string& id, int size,
                         int stride);

// Writes every patch back at its origin; overlapping writes agree for sets
// produced by extract_patches, so this reproduces the padded source exactly.
ImageF reassemble_padded(const PatchSet& ps, int source_index, bool from_labels = false);

// Deterministic patch-level holdout. Returns (train indices, val indices),
// disjoint, union = [0, n). fraction must lie in (0,1).
std::pair<std::vector<int>, std::vector<int>> split_validation_indices(int n, double fraction,
                                                                       std::uint64_t seed);
std::pair<PatchSet, PatchSet> split_validation(const PatchSet& ps, double fraction, std::uint64_t seed);

}  // namespace awnet
