#include "awnet/model/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

namespace awnet {

namespace {

constexpr char kMagic[8] = {'A', 'W', 'N', 'E', 'T', 'C', 'K', 'P'};

nlohmann::json config_to_json(const ModelConfig& c) {
    return nlohmann::json{{"levels", c.levels},
                          {"in_channels", c.in_channels},
                          {"base_channels", c.base_channels},
                          {"kernel", c.kernel},
                          {"dropout_rate", c.dropout_rate},
                          {"attention", to_string(c.attention)},
                          {"resblock", to_string(c.resblock)}};
}

ModelConfig config_from_json(const nlohmann::json& j) {
    ModelConfig c;
    c.levels = j.at("levels").get<int>();
    c.in_channels = j.at("in_channels").get<int>();
    c.base_channels = j.at("base_channels").get<int>();
    c.kernel = j.at("kernel").get<int>();
    c.dropout_rate = j.at("dropout_rate").get<double>();
    c.attention = attention_from_string(j.at("attention").get<std::string>());
    c.resblock = resblock_from_string(j.at("resblock").get<std::string>());
    return c;
}

struct TensorRef {
    std::string name;
    const Tensor<float>* tensor;
};

std::vector<TensorRef> enumerate_tensors(AttentionWNet<float>& model) {
    std::vector<TensorRef> refs;
    for (auto& p : model.params()) refs.push_back({p.name, &p.param->value});
    for (auto& s : model.state()) refs.push_back({s.name, s.tensor});
    return refs;
}

nlohmann::json read_header(std::ifstream& in, const std::filesystem::path& path) {
    char magic[8];
    std::uint32_t version = 0;
    std::uint64_t header_len = 0;
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0) throw IoError("not a checkpoint file: " + path.string());
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    if (version != kCheckpointVersion)
        throw IoError("unsupported checkpoint version " + std::to_string(version) + " in " + path.string());
    in.read(reinterpret_cast<char*>(&header_len), sizeof header_len);
    std::string header(header_len, '\0');
    in.read(header.data(), static_cast<std::streamsize>(header_len));
    if (!in) throw IoError("truncated checkpoint header: " + path.string());
    return nlohmann::json::parse(header);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, AttentionWNet<float>& model, int epoch,
                     std::uint64_t seed) {
    auto refs = enumerate_tensors(model);
    nlohmann::json header;
    header["config"] = config_to_json(model.config());
    header["epoch"] = epoch;
    header["seed"] = seed;
    header["dtype"] = "f32";
    auto& tensors = header["tensors"] = nlohmann::json::array();
    for (const auto& r : refs)
        tensors.push_back({{"name", r.name},
                           {"shape", {r.tensor->n(), r.tensor->c(), r.tensor->h(), r.tensor->w()}}});
    const std::string htext = header.dump();

    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint: " + path.string());
    out.write(kMagic, 8);
    const std::uint32_t version = kCheckpointVersion;
    out.write(reinterpret_cast<const char*>(&version), sizeof version);
    const std::uint64_t hlen = htext.size();
    out.write(reinterpret_cast<const char*>(&hlen), sizeof hlen);
    out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
    for (const auto& r : refs)
        out.write(reinterpret_cast<const char*>(r.tensor->data()),
                  static_cast<std::streamsize>(r.tensor->size() * sizeof(float)));
    if (!out) throw IoError("short write on checkpoint: " + path.string());
}

CheckpointMeta read_checkpoint_meta(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path.string());
    const nlohmann::json header = read_header(in, path);
    CheckpointMeta meta;
    meta.config = config_from_json(header.at("config"));
    meta.epoch = header.at("epoch").get<int>();
    meta.seed = header.at("seed").get<std::uint64_t>();
    return meta;
}

AttentionWNet<float> load_checkpoint(const std::filesystem::path& path, CheckpointMeta* meta_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path.string());
    const nlohmann::json header = read_header(in, path);
    CheckpointMeta meta;
    meta.config = config_from_json(header.at("config"));
    meta.epoch = header.at("epoch").get<int>();
    meta.seed = header.at("seed").get<std::uint64_t>();

    AttentionWNet<float> model(meta.config, meta.seed);
    auto refs = enumerate_tensors(model);
    const auto& tensors = header.at("tensors");
    if (tensors.size() != refs.size())
        throw IoError("checkpoint tensor count mismatch in " + path.string());
    for (std::size_t i = 0; i < refs.size(); ++i) {
        const auto& t = tensors[i];
        if (t.at("name").get<std::string>() != refs[i].name)
            throw IoError("checkpoint tensor name mismatch: expected " + refs[i].name + ", found " +
                          t.at("name").get<std::string>());
        const auto shape = t.at("shape").get<std::vector<int>>();
        const Tensor<float>* dst = refs[i].tensor;
        if (shape.size() != 4 || shape[0] != dst->n() || shape[1] != dst->c() || shape[2] != dst->h() ||
            shape[3] != dst->w())
            throw IoError("checkpoint tensor shape mismatch for " + refs[i].name);
        in.read(reinterpret_cast<char*>(const_cast<float*>(dst->data())),
                static_cast<std::streamsize>(dst->size() * sizeof(float)));
        if (!in) throw IoError("truncated checkpoint data: " + path.string());
    }
    if (meta_out) *meta_out = meta;
    return model;
}

}  // namespace awnet
