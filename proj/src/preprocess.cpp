#include "awnet/data/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/imgproc.hpp>

namespace awnet {

ImageF to_grayscale(const ImageU8& rgb) {
    ImageF out(rgb.h, rgb.w, 1);
    if (rgb.channels == 1) {
        for (int y = 0; y < rgb.h; ++y)
            for (int x = 0; x < rgb.w; ++x) out.at(y, x) = rgb.at(y, x, 0) / 255.f;
        return out;
    }
    for (int y = 0; y < rgb.h; ++y)
        for (int x = 0; x < rgb.w; ++x)
            out.at(y, x) = (0.299f * rgb.at(y, x, 0) + 0.587f * rgb.at(y, x, 1) + 0.114f * rgb.at(y, x, 2)) / 255.f;
    return out;
}

GrayStats dataset_gray_stats(const std::vector<FundusSample>& samples) {
    long double sum = 0.0L, sq = 0.0L;
    std::size_t n = 0;
    for (const auto& s : samples) {
        const ImageF g = to_grayscale(s.image);
        for (float v : g.px) {
            sum += v;
            sq += static_cast<long double>(v) * v;
            ++n;
        }
    }
    GrayStats st;
    if (n == 0) return st;
    st.mean = static_cast<double>(sum / n);
    const double var = static_cast<double>(sq / n) - st.mean * st.mean;
    st.stddev = var > 0 ? std::sqrt(var) : 0.0;
    return st;
}

std::string preprocess_version_hash(const PreprocessSettings& s) {
    // FNV-1a over the pipeline description; any change invalidates caches.
    std::string desc = "preproc-v1|gray|zscore|rescale01|clahe:" + std::to_string(s.clahe_tile) + ":" +
                       std::to_string(s.clahe_clip) + "|gamma:" + std::to_string(s.gamma) +
                       "|enhance:" + (s.enhance ? "1" : "0");
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : desc) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ImageF preprocess(const FundusSample& sample, const PreprocessSettings& s,
                  const std::optional<GrayStats>& stats) {
    ImageF g = to_grayscale(sample.image);
    if (!s.enhance) return g;

    double mean, stddev;
    if (stats) {
        mean = stats->mean;
        stddev = stats->stddev;
    } else {
        long double sum = 0.0L, sq = 0.0L;
        for (float v : g.px) {
            sum += v;
            sq += static_cast<long double>(v) * v;
        }
        mean = static_cast<double>(sum / g.px.size());
        const double var = static_cast<double>(sq / g.px.size()) - mean * mean;
        stddev = var > 0 ? std::sqrt(var) : 0.0;
    }

    // z-score, then per-image min-max back to [0,1]
    float mn = 1e30f, mx = -1e30f;
    for (float& v : g.px) {
        v = stddev > 1e-12 ? static_cast<float>((v - mean) / stddev) : 0.f;
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    if (mx - mn < 1e-12f) {
        std::fill(g.px.begin(), g.px.end(), 0.5f);
        return g;
    }
    for (float& v : g.px) v = (v - mn) / (mx - mn);

    // CLAHE on the 8-bit quantisation, as in the backbone lineage.
    cv::Mat m8(g.h, g.w, CV_8UC1);
    for (int y = 0; y < g.h; ++y)
        for (int x = 0; x < g.w; ++x)
            m8.at<std::uint8_t>(y, x) = static_cast<std::uint8_t>(std::lround(g.at(y, x) * 255.f));
    auto clahe = cv::createCLAHE(s.clahe_clip, cv::Size(s.clahe_tile, s.clahe_tile));
    cv::Mat eq;
    clahe->apply(m8, eq);

    // gamma LUT: v -> v^(1/gamma)
    const double inv_gamma = 1.0 / s.gamma;
    for (int y = 0; y < g.h; ++y)
        for (int x = 0; x < g.w; ++x) {
            const double v = eq.at<std::uint8_t>(y, x) / 255.0;
            g.at(y, x) = static_cast<float>(std::clamp(std::pow(v, inv_gamma), 0.0, 1.0));
        }
    return g;
}

}  // namespace awnet
