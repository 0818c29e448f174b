#include "awnet/data/patch_cache.hpp"

#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

namespace awnet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'A', 'W', 'N', 'E', 'T', 'P', 'A', 'T'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 1469598103934665603ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t hash_patchset(const PatchSet& ps) {
    std::uint64_t h = fnv1a(ps.patches.data(), ps.patches.size() * sizeof(float));
    if (ps.has_labels()) h = fnv1a(ps.labels.data(), ps.labels.size() * sizeof(float), h);
    h = fnv1a(ps.origins.data(), ps.origins.size() * sizeof(PatchOrigin), h);
    return h;
}

void write_archive(const fs::path& path, const PatchSet& ps) {
    json header;
    header["patch"] = ps.patch;
    header["count"] = ps.count();
    header["has_labels"] = ps.has_labels();
    auto& srcs = header["sources"] = json::array();
    for (const auto& s : ps.sources)
        srcs.push_back({{"id", s.id},
                        {"orig_h", s.orig_h},
                        {"orig_w", s.orig_w},
                        {"padded_h", s.padded_h},
                        {"padded_w", s.padded_w}});
    const std::string htext = header.dump();

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write patch archive: " + path.string());
    out.write(kMagic, 8);
    out.write(reinterpret_cast<const char*>(&kVersion), sizeof kVersion);
    const std::uint64_t hlen = htext.size();
    out.write(reinterpret_cast<const char*>(&hlen), sizeof hlen);
    out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
    for (const auto& o : ps.origins) {
        const std::int32_t v[3] = {o.source, o.row, o.col};
        out.write(reinterpret_cast<const char*>(v), sizeof v);
    }
    out.write(reinterpret_cast<const char*>(ps.patches.data()),
              static_cast<std::streamsize>(ps.patches.size() * sizeof(float)));
    if (ps.has_labels())
        out.write(reinterpret_cast<const char*>(ps.labels.data()),
                  static_cast<std::streamsize>(ps.labels.size() * sizeof(float)));
    if (!out) throw IoError("short write on patch archive: " + path.string());
}

}  // namespace

PatchSet load_patch_cache(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open patch archive: " + path.string());
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0) throw IoError("not a patch archive: " + path.string());
    std::uint32_t version = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    if (version != kVersion) throw IoError("unsupported patch archive version in " + path.string());
    std::uint64_t hlen = 0;
    in.read(reinterpret_cast<char*>(&hlen), sizeof hlen);
    std::string htext(hlen, '\0');
    in.read(htext.data(), static_cast<std::streamsize>(hlen));
    if (!in) throw IoError("truncated patch archive header: " + path.string());
    const json header = json::parse(htext);

    PatchSet ps;
    ps.patch = header.at("patch").get<int>();
    const int count = header.at("count").get<int>();
    const bool has_labels = header.at("has_labels").get<bool>();
    for (const auto& s : header.at("sources"))
        ps.sources.push_back({s.at("id").get<std::string>(), s.at("orig_h").get<int>(),
                              s.at("orig_w").get<int>(), s.at("padded_h").get<int>(),
                              s.at("padded_w").get<int>()});
    ps.origins.resize(count);
    for (int i = 0; i < count; ++i) {
        std::int32_t v[3];
        in.read(reinterpret_cast<char*>(v), sizeof v);
        ps.origins[i] = {v[0], v[1], v[2]};
    }
    ps.patches = Tensor<float>(count, 1, ps.patch, ps.patch);
    in.read(reinterpret_cast<char*>(ps.patches.data()),
            static_cast<std::streamsize>(ps.patches.size() * sizeof(float)));
    if (has_labels) {
        ps.labels = Tensor<float>(count, 1, ps.patch, ps.patch);
        in.read(reinterpret_cast<char*>(ps.labels.data()),
                static_cast<std::streamsize>(ps.labels.size() * sizeof(float)));
    }
    if (!in) throw IoError("truncated patch archive data: " + path.string());
    return ps;
}

PrepareResult prepare_patch_cache(const fs::path& out_dir, const std::vector<FundusSample>& samples,
                                  DatasetId ds, Split split, int stride, const PreprocessSettings& pp) {
    if (samples.empty()) throw DataError("prepare: no samples");
    fs::create_directories(out_dir);
    const std::string stem = "patches_" + to_string(ds) + "_" + to_string(split) + "_s" + std::to_string(stride);
    PrepareResult res;
    res.archive = out_dir / (stem + ".bin");
    res.manifest = out_dir / (stem + ".manifest.json");

    const std::string pp_hash = preprocess_version_hash(pp);

    // Cache probe: manifest fields + payload checksum must both match.
    if (fs::exists(res.manifest) && fs::exists(res.archive)) {
        try {
            std::ifstream min(res.manifest);
            const json m = json::parse(min);
            if (m.at("dataset") == to_string(ds) && m.at("split") == to_string(split) &&
                m.at("stride") == stride && m.at("patch") == kPatchSize &&
                m.at("preprocess_hash") == pp_hash && m.at("source_count") == samples.size()) {
                const PatchSet cached = load_patch_cache(res.archive);
                if (hash_patchset(cached) == m.at("data_hash").get<std::uint64_t>()) {
                    res.cache_hit = true;
                    res.patch_count = cached.count();
                    return res;
                }
                res.rebuilt_corrupt = true;
            }
        } catch (const std::exception&) {
            res.rebuilt_corrupt = true;
        }
    }

    const GrayStats stats = dataset_gray_stats(samples);
    PatchSet all;
    for (const auto& s : samples) {
        const ImageF img = preprocess(s, pp, stats);
        const ImageF lbl = mask_to_float(s.vessel_mask);
        all.append(extract_patches(img, &lbl, s.id, kPatchSize, stride));
    }
    write_archive(res.archive, all);

    json manifest;
    manifest["dataset"] = to_string(ds);
    manifest["split"] = to_string(split);
    manifest["stride"] = stride;
    manifest["patch"] = kPatchSize;
    manifest["preprocess_hash"] = pp_hash;
    manifest["source_count"] = samples.size();
    manifest["patch_count"] = all.count();
    manifest["data_hash"] = hash_patchset(all);
    auto& srcs = manifest["sources"] = json::array();
    for (const auto& s : all.sources)
        srcs.push_back({{"id", s.id}, {"orig_h", s.orig_h}, {"orig_w", s.orig_w}});
    std::ofstream mout(res.manifest, std::ios::trunc);
    mout << manifest.dump(2) << "\n";
    if (!mout) throw IoError("cannot write manifest: " + res.manifest.string());

    res.patch_count = all.count();
    return res;
}

}  // namespace awnet
