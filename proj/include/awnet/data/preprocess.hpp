#pragma once

#include <optional>
#include <string>
#include <vector>

#include "awnet/data/dataset.hpp"

namespace awnet {

// Deterministic intensity pipeline applied before patching:
// luminance grayscale -> z-score -> rescale to [0,1] -> local histogram
// equalisation (CLAHE) -> gamma LUT. One switch disables everything past
// grayscale so ablations can run on raw intensities.
struct PreprocessSettings {
    bool enhance = true;
    int clahe_tile = 8;
    double clahe_clip = 2.0;
    double gamma = 1.2;
};

struct GrayStats {
    double mean = 0.0;
    double stddev = 1.0;
};

// Mean/stddev of the luminance over a sample collection (z-score reference).
GrayStats dataset_gray_stats(const std::vector<FundusSample>& samples);

ImageF to_grayscale(const ImageU8& rgb);

// stats == nullopt falls back to the image's own statistics.
ImageF preprocess(const FundusSample& sample, const PreprocessSettings& s,
                  const std::optional<GrayStats>& stats = std::nullopt);

// Version fingerprint recorded in cache manifests; changes whenever the
// pipeline shape or its parameters change.
std::string preprocess_version_hash(const PreprocessSettings& s);

}  // namespace awnet
