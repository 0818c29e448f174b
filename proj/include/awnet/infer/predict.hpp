#pragma once

#include <optional>
#include <string>

#include "awnet/data/dataset.hpp"
#include "awnet/data/preprocess.hpp"
#include "awnet/model/wnet.hpp"

namespace awnet {

struct ProbabilityMap {
    std::string id;
    ImageF values;   // H x W in [0,1], original (unpadded) extent
    BinaryMask fov;  // evaluation region
};

// Per-pixel arithmetic mean of the model outputs over every stride-spaced
// patch covering the pixel. The padded border is cropped off afterwards.
// Results are bit-identical for any batch_size (patches are scored
// independently and accumulated in grid order).
ImageF predict_map(AttentionWNet<float>& model, const ImageF& input, int stride, int batch_size = 1024);

ProbabilityMap predict_image(AttentionWNet<float>& model, const FundusSample& sample,
                             const PreprocessSettings& pp, const std::optional<GrayStats>& stats,
                             int stride, int batch_size = 1024);

// Coverage multiplicity per padded pixel for a given grid (diagnostics/tests).
Image<std::int32_t> coverage_counts(int h, int w, int size, int stride);

// mask = 1 where prob >= threshold and fov = 1 (ties count as vessel).
BinaryMask binarize(const ProbabilityMap& pm, double threshold = 0.5);

}  // namespace awnet
