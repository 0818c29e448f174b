#include "awnet/augment/augment.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/imgproc.hpp>

namespace awnet {

namespace {

cv::Mat wrap(ImageF& img) { return cv::Mat(img.h, img.w, CV_32FC1, img.px.data()); }

void remap_pair(ImageF& img, ImageF& label, const cv::Mat& map_x, const cv::Mat& map_y,
                bool image_nearest) {
    cv::Mat src_img = wrap(img).clone();
    cv::Mat dst_img;
    cv::remap(src_img, dst_img, map_x, map_y, image_nearest ? cv::INTER_NEAREST : cv::INTER_LINEAR,
              cv::BORDER_REFLECT_101);
    dst_img.copyTo(wrap(img));
    if (!label.empty()) {
        cv::Mat src_lbl = wrap(label).clone();
        cv::Mat dst_lbl;
        cv::remap(src_lbl, dst_lbl, map_x, map_y, cv::INTER_NEAREST, cv::BORDER_REFLECT_101);
        dst_lbl.copyTo(wrap(label));
    }
}

void clamp01(ImageF& img) {
    for (float& v : img.px) v = std::clamp(v, 0.f, 1.f);
}

}  // namespace

void AugmentConfig::validate() const {
    for (double p : {p_crop, p_vflip, p_rot90, p_elastic, p_grid, p_optical, p_brightness, p_gamma})
        if (p < 0.0 || p > 1.0) throw ConfigError("augment probability outside [0,1]");
    if (crop_scale_min <= 0.0 || crop_scale_min > crop_scale_max || crop_scale_max > 1.0)
        throw ConfigError("crop scale range must satisfy 0 < min <= max <= 1");
    if (elastic_sigma <= 0.0) throw ConfigError("elastic sigma must be positive");
    if (elastic_alpha < 0.0) throw ConfigError("elastic alpha must be >= 0");
    if (grid_steps < 1) throw ConfigError("grid steps must be >= 1");
    if (grid_limit < 0.0 || grid_limit >= 1.0) throw ConfigError("grid limit must be in [0,1)");
    if (gamma_min <= 0.0 || gamma_min > gamma_max) throw ConfigError("bad gamma range");
}

void vertical_flip(ImageF& img) {
    for (int y = 0; y < img.h / 2; ++y)
        for (int x = 0; x < img.w; ++x) std::swap(img.at(y, x), img.at(img.h - 1 - y, x));
}

void rotate90(ImageF& img, int quarter_turns) {
    int k = ((quarter_turns % 4) + 4) % 4;
    for (int t = 0; t < k; ++t) {
        // one counter-clockwise quarter turn
        ImageF out(img.w, img.h, 1);
        for (int y = 0; y < img.h; ++y)
            for (int x = 0; x < img.w; ++x) out.at(img.w - 1 - x, y) = img.at(y, x);
        img = std::move(out);
    }
}

ElasticField elastic_field(int h, int w, double sigma, Rng& rng) {
    ElasticField f;
    f.h = h;
    f.w = w;
    f.dx.resize(static_cast<std::size_t>(h) * w);
    f.dy.resize(static_cast<std::size_t>(h) * w);
    for (auto& v : f.dx) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    for (auto& v : f.dy) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    const int ksize = 2 * static_cast<int>(std::ceil(3.0 * sigma)) + 1;
    cv::Mat mx(h, w, CV_32FC1, f.dx.data()), my(h, w, CV_32FC1, f.dy.data());
    cv::GaussianBlur(mx, mx, cv::Size(ksize, ksize), sigma, sigma, cv::BORDER_REFLECT_101);
    cv::GaussianBlur(my, my, cv::Size(ksize, ksize), sigma, sigma, cv::BORDER_REFLECT_101);
    return f;
}

void elastic_apply(ImageF& img, const ElasticField& field, double alpha, bool nearest) {
    cv::Mat map_x(field.h, field.w, CV_32FC1), map_y(field.h, field.w, CV_32FC1);
    for (int y = 0; y < field.h; ++y)
        for (int x = 0; x < field.w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * field.w + x;
            map_x.at<float>(y, x) = x + static_cast<float>(alpha) * field.dx[i];
            map_y.at<float>(y, x) = y + static_cast<float>(alpha) * field.dy[i];
        }
    ImageF none;
    remap_pair(img, none, map_x, map_y, nearest);
}

void elastic_transform(ImageF& img, ImageF& label, double alpha, double sigma, Rng& rng,
                       bool image_nearest) {
    if (alpha < 0.0) throw ConfigError("elastic alpha must be >= 0");
    const ElasticField f = elastic_field(img.h, img.w, sigma, rng);
    if (alpha == 0.0) return;  // identity by construction
    cv::Mat map_x(f.h, f.w, CV_32FC1), map_y(f.h, f.w, CV_32FC1);
    for (int y = 0; y < f.h; ++y)
        for (int x = 0; x < f.w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * f.w + x;
            map_x.at<float>(y, x) = x + static_cast<float>(alpha) * f.dx[i];
            map_y.at<float>(y, x) = y + static_cast<float>(alpha) * f.dy[i];
        }
    remap_pair(img, label, map_x, map_y, image_nearest);
}

void grid_distortion(ImageF& img, ImageF& label, int num_steps, double distort_limit, Rng& rng,
                     bool image_nearest) {
    // Perturb the widths of a num_steps x num_steps cell grid, renormalise so
    // the full extent is preserved (mapping stays monotone for limit < 1),
    // then resample through the piecewise-linear inverse.
    auto make_axis = [&](int extent) {
        std::vector<double> widths(num_steps);
        double total = 0.0;
        const double cell = static_cast<double>(extent) / num_steps;
        for (int i = 0; i < num_steps; ++i) {
            widths[i] = cell * (1.0 + rng.uniform(-distort_limit, distort_limit));
            total += widths[i];
        }
        std::vector<double> pos(num_steps + 1, 0.0);
        for (int i = 0; i < num_steps; ++i) pos[i + 1] = pos[i] + widths[i] * extent / total;
        return pos;  // distorted positions of the original uniform grid lines
    };
    const std::vector<double> gx = make_axis(img.w);
    const std::vector<double> gy = make_axis(img.h);

    auto inverse_lookup = [&](const std::vector<double>& pos, int extent, double t) {
        // find cell with pos[i] <= t <= pos[i+1]; map back to uniform grid
        const double cell = static_cast<double>(extent) / num_steps;
        int i = 0;
        while (i + 1 < num_steps && t > pos[i + 1]) ++i;
        const double span = pos[i + 1] - pos[i];
        const double frac = span > 1e-12 ? (t - pos[i]) / span : 0.0;
        return cell * (i + frac);
    };

    cv::Mat map_x(img.h, img.w, CV_32FC1), map_y(img.h, img.w, CV_32FC1);
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x) {
            map_x.at<float>(y, x) = static_cast<float>(inverse_lookup(gx, img.w, x));
            map_y.at<float>(y, x) = static_cast<float>(inverse_lookup(gy, img.h, y));
        }
    remap_pair(img, label, map_x, map_y, image_nearest);
}

void optical_distortion(ImageF& img, ImageF& label, double distort_limit, double shift_limit, Rng& rng,
                        bool image_nearest) {
    // Radial barrel/pincushion model around a shifted centre:
    // src = centre + (dst - centre) * (1 + k * r^2), r normalised.
    const double k = rng.uniform(-distort_limit, distort_limit);
    const double cx = (img.w - 1) / 2.0 + rng.uniform(-shift_limit, shift_limit);
    const double cy = (img.h - 1) / 2.0 + rng.uniform(-shift_limit, shift_limit);
    const double rmax = std::sqrt(cx * cx + cy * cy) + 1e-9;
    cv::Mat map_x(img.h, img.w, CV_32FC1), map_y(img.h, img.w, CV_32FC1);
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x) {
            const double dx = x - cx, dy = y - cy;
            const double r2 = (dx * dx + dy * dy) / (rmax * rmax);
            const double f = 1.0 + k * r2;
            map_x.at<float>(y, x) = static_cast<float>(cx + dx * f);
            map_y.at<float>(y, x) = static_cast<float>(cy + dy * f);
        }
    remap_pair(img, label, map_x, map_y, image_nearest);
}

void random_sized_crop(ImageF& img, ImageF& label, double scale_min, double scale_max, bool pad_back,
                       Rng& rng, bool image_nearest) {
    const int full = img.h;  // patches are square
    const double scale = rng.uniform(scale_min, scale_max);
    const int side = std::clamp(static_cast<int>(std::lround(full * scale)), 1, full);
    if (side == full) return;
    const int max_off = full - side;
    const int oy = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(max_off) + 1));
    const int ox = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(max_off) + 1));

    auto crop_one = [&](ImageF& src, bool nearest) {
        if (pad_back) {
            // keep the crop in place, reflect everything else back in
            cv::Mat m = wrap(src).clone();
            cv::Mat roi = m(cv::Rect(ox, oy, side, side)).clone();
            cv::Mat padded;
            cv::copyMakeBorder(roi, padded, oy, full - side - oy, ox, full - side - ox,
                               cv::BORDER_REFLECT_101);
            padded.copyTo(wrap(src));
        } else {
            cv::Mat m = wrap(src).clone();
            cv::Mat roi = m(cv::Rect(ox, oy, side, side));
            cv::Mat resized;
            cv::resize(roi, resized, cv::Size(full, full), 0, 0,
                       nearest ? cv::INTER_NEAREST : cv::INTER_LINEAR);
            resized.copyTo(wrap(src));
        }
    };
    crop_one(img, image_nearest);
    if (!label.empty()) crop_one(label, true);
}

void brightness_contrast(ImageF& img, double contrast_alpha, double brightness_beta) {
    double mean = 0.0;
    for (float v : img.px) mean += v;
    mean /= static_cast<double>(img.px.size());
    for (float& v : img.px)
        v = static_cast<float>((v - mean) * contrast_alpha + mean + brightness_beta);
    clamp01(img);
}

void apply_gamma(ImageF& img, double gamma) {
    for (float& v : img.px) v = static_cast<float>(std::pow(std::clamp(v, 0.f, 1.f), gamma));
}

std::uint32_t augment(ImageF& patch, ImageF& label, const AugmentConfig& cfg, Rng& rng) {
    cfg.validate();
    if (!label.empty() && (label.h != patch.h || label.w != patch.w))
        throw InputError("augment: patch/label size mismatch");
    std::uint32_t applied = 0;

    if (rng.bernoulli(cfg.p_crop)) {
        applied |= kAugCrop;
        random_sized_crop(patch, label, cfg.crop_scale_min, cfg.crop_scale_max, cfg.crop_pad_back, rng,
                          cfg.image_nearest);
    }
    if (rng.bernoulli(cfg.p_vflip)) {
        applied |= kAugVFlip;
        vertical_flip(patch);
        if (!label.empty()) vertical_flip(label);
    }
    if (rng.bernoulli(cfg.p_rot90)) {
        applied |= kAugRot90;
        const int k = 1 + static_cast<int>(rng.uniform_index(3));
        rotate90(patch, k);
        if (!label.empty()) rotate90(label, k);
    }
    if (rng.bernoulli(cfg.p_elastic)) {
        applied |= kAugElastic;
        elastic_transform(patch, label, cfg.elastic_alpha, cfg.elastic_sigma, rng, cfg.image_nearest);
    }
    if (rng.bernoulli(cfg.p_grid)) {
        applied |= kAugGrid;
        grid_distortion(patch, label, cfg.grid_steps, cfg.grid_limit, rng, cfg.image_nearest);
    }
    if (rng.bernoulli(cfg.p_optical)) {
        applied |= kAugOptical;
        optical_distortion(patch, label, cfg.optical_limit, cfg.optical_shift, rng, cfg.image_nearest);
    }
    if (rng.bernoulli(cfg.p_brightness)) {
        applied |= kAugBrightness;
        const double alpha = 1.0 + rng.uniform(-cfg.contrast_limit, cfg.contrast_limit);
        const double beta = rng.uniform(-cfg.brightness_limit, cfg.brightness_limit);
        brightness_contrast(patch, alpha, beta);
    }
    if (rng.bernoulli(cfg.p_gamma)) {
        applied |= kAugGamma;
        apply_gamma(patch, rng.uniform(cfg.gamma_min, cfg.gamma_max));
    }

    if (!label.empty())
        for (float& v : label.px) v = v >= 0.5f ? 1.f : 0.f;  // nearest resampling keeps {0,1}; enforce anyway
    return applied;
}

}  // namespace awnet
