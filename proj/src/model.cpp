#include "awnet/model/wnet.hpp"

namespace awnet {

std::string to_string(AttentionType t) {
    switch (t) {
        case AttentionType::None: return "none";
        case AttentionType::Type1: return "type1";
        case AttentionType::Type2: return "type2";
    }
    return "none";
}

AttentionType attention_from_string(const std::string& s) {
    if (s == "none") return AttentionType::None;
    if (s == "type1" || s == "1") return AttentionType::Type1;
    if (s == "type2" || s == "2") return AttentionType::Type2;
    throw ConfigError("unknown attention type: " + s);
}

std::string to_string(ResBlockVariant v) {
    switch (v) {
        case ResBlockVariant::Shared: return "shared";
        case ResBlockVariant::Plain: return "plain";
        case ResBlockVariant::NoBatchNorm: return "nobn";
    }
    return "shared";
}

ResBlockVariant resblock_from_string(const std::string& s) {
    if (s == "shared") return ResBlockVariant::Shared;
    if (s == "plain") return ResBlockVariant::Plain;
    if (s == "nobn" || s == "laddernet") return ResBlockVariant::NoBatchNorm;
    throw ConfigError("unknown resblock variant: " + s);
}

std::int64_t count_parameters(const ModelConfig& cfg) {
    AttentionWNet<float> net(cfg);
    return net.parameter_count();
}

}  // namespace awnet
