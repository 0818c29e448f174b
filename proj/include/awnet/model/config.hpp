#pragma once

#include <string>

#include "awnet/errors.hpp"

namespace awnet {

// Skip-connection fusion inside the two decoder phases.
//   None  - plain additive skip (the backbone network unchanged)
//   Type1 - attention map applied to the decoder feature: p .* x
//   Type2 - attention map applied to the encoder feature, then added: g .* p + x
enum class AttentionType { None, Type1, Type2 };

// Residual block flavour.
//   Shared    - one conv kernel applied twice, BatchNorm after each application
//   Plain     - two independent conv kernels, BatchNorm after each
//   NoBatchNorm - one shared kernel, no BatchNorm (the unmodified backbone block)
enum class ResBlockVariant { Shared, Plain, NoBatchNorm };

struct ModelConfig {
    int levels = 5;           // resolution scales; levels-1 downsampling steps
    int in_channels = 1;      // preprocessed grayscale by default
    int base_channels = 10;   // channels at full resolution, doubling per level
    int kernel = 3;
    double dropout_rate = 0.25;
    AttentionType attention = AttentionType::Type2;
    ResBlockVariant resblock = ResBlockVariant::Shared;

    int spatial_divisor() const { return 1 << (levels - 1); }

    void validate() const {
        if (levels < 2) throw ConfigError("levels must be >= 2");
        if (base_channels < 1) throw ConfigError("base_channels must be >= 1");
        if (in_channels < 1) throw ConfigError("in_channels must be >= 1");
        if (kernel < 1 || kernel % 2 == 0) throw ConfigError("kernel must be odd and >= 1");
        if (dropout_rate < 0.0 || dropout_rate >= 1.0) throw ConfigError("dropout_rate must be in [0,1)");
    }
};

std::string to_string(AttentionType t);
AttentionType attention_from_string(const std::string& s);
std::string to_string(ResBlockVariant v);
ResBlockVariant resblock_from_string(const std::string& s);

}  // namespace awnet
