#pragma once

#include <cstdint>
#include <vector>

#include "awnet/data/image.hpp"
#include "awnet/rng.hpp"

namespace awnet {

// Stochastic training-time augmentation over a (patch, label) pair. Firing
// probabilities follow the published recipe; magnitude ranges are exposed
// here because they are tunables, not part of the recipe. Geometric
// transforms warp both tensors with identical geometry (nearest-neighbour
// resampling for the label); photometric transforms touch the image only and
// clamp it back to [0,1].
struct AugmentConfig {
    double p_crop = 0.5;
    double p_vflip = 0.5;
    double p_rot90 = 0.5;
    double p_elastic = 0.5;
    double p_grid = 0.5;
    double p_optical = 0.8;
    double p_brightness = 0.8;
    double p_gamma = 0.8;

    double crop_scale_min = 0.8, crop_scale_max = 1.0;
    bool crop_pad_back = false;  // default: crop then resize back to full size
    double elastic_alpha = 10.0, elastic_sigma = 4.0;
    int grid_steps = 5;
    double grid_limit = 0.3;
    double optical_limit = 0.05, optical_shift = 2.0;
    double brightness_limit = 0.2, contrast_limit = 0.2;
    double gamma_min = 0.8, gamma_max = 1.25;

    bool image_nearest = false;  // sample the image with nearest-neighbour too

    void validate() const;
};

// Bit per transform in application order; returned so callers can log or
// count empirical firing rates.
enum AugmentOpBit : std::uint32_t {
    kAugCrop = 1u << 0,
    kAugVFlip = 1u << 1,
    kAugRot90 = 1u << 2,
    kAugElastic = 1u << 3,
    kAugGrid = 1u << 4,
    kAugOptical = 1u << 5,
    kAugBrightness = 1u << 6,
    kAugGamma = 1u << 7,
};
inline constexpr int kAugmentOpCount = 8;

std::uint32_t augment(ImageF& patch, ImageF& label, const AugmentConfig& cfg, Rng& rng);

// ---- primitives (exposed for direct testing) ----

void vertical_flip(ImageF& img);
void rotate90(ImageF& img, int quarter_turns);

struct ElasticField {
    int h = 0, w = 0;
    std::vector<float> dx, dy;  // smoothed, unscaled displacement in pixels
};
ElasticField elastic_field(int h, int w, double sigma, Rng& rng);
void elastic_apply(ImageF& img, const ElasticField& field, double alpha, bool nearest);
void elastic_transform(ImageF& img, ImageF& label, double alpha, double sigma, Rng& rng, bool image_nearest);

void grid_distortion(ImageF& img, ImageF& label, int num_steps, double distort_limit, Rng& rng,
                     bool image_nearest);
void optical_distortion(ImageF& img, ImageF& label, double distort_limit, double shift_limit, Rng& rng,
                        bool image_nearest);
void random_sized_crop(ImageF& img, ImageF& label, double scale_min, double scale_max, bool pad_back,
                       Rng& rng, bool image_nearest);

// Contrast pivots on the image mean, so a flat image shifts by exactly beta.
void brightness_contrast(ImageF& img, double contrast_alpha, double brightness_beta);
void apply_gamma(ImageF& img, double gamma);

}  // namespace awnet
