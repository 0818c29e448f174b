#include "awnet/data/image.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

namespace awnet {

namespace {

bool has_extension(const std::filesystem::path& p, const char* ext) {
    std::string e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
    return e == ext;
}

ImageU8 from_cv_bgr(const cv::Mat& m, const std::filesystem::path& path) {
    if (m.empty()) throw DataError("cannot decode image: " + path.string());
    cv::Mat bgr;
    if (m.channels() == 1)
        cv::cvtColor(m, bgr, cv::COLOR_GRAY2BGR);
    else if (m.channels() == 4)
        cv::cvtColor(m, bgr, cv::COLOR_BGRA2BGR);
    else
        bgr = m;
    if (bgr.depth() != CV_8U) bgr.convertTo(bgr, CV_8U);
    ImageU8 out(bgr.rows, bgr.cols, 3);
    for (int y = 0; y < bgr.rows; ++y) {
        const cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            out.at(y, x, 0) = row[x][2];
            out.at(y, x, 1) = row[x][1];
            out.at(y, x, 2) = row[x][0];
        }
    }
    return out;
}

}  // namespace

ImageU8 read_image_rgb(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw DataError("missing file: " + path.string());
    if (has_extension(path, ".gif")) return read_gif(path);
    cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    return from_cv_bgr(m, path);
}

BinaryMask read_binary_mask(const std::filesystem::path& path) {
    const ImageU8 rgb = read_image_rgb(path);
    BinaryMask out(rgb.h, rgb.w, 1);
    for (int y = 0; y < rgb.h; ++y)
        for (int x = 0; x < rgb.w; ++x) {
            const int lum = (rgb.at(y, x, 0) + rgb.at(y, x, 1) + rgb.at(y, x, 2)) / 3;
            out.at(y, x) = lum >= 128 ? 1 : 0;
        }
    return out;
}

void write_image_rgb(const std::filesystem::path& path, const ImageU8& img) {
    if (img.channels != 3) throw IoError("write_image_rgb expects 3 channels");
    cv::Mat m(img.h, img.w, CV_8UC3);
    for (int y = 0; y < img.h; ++y) {
        cv::Vec3b* row = m.ptr<cv::Vec3b>(y);
        for (int x = 0; x < img.w; ++x) {
            row[x][2] = img.at(y, x, 0);
            row[x][1] = img.at(y, x, 1);
            row[x][0] = img.at(y, x, 2);
        }
    }
    if (!cv::imwrite(path.string(), m)) throw IoError("cannot write image: " + path.string());
}

void write_png_gray8(const std::filesystem::path& path, const ImageF& img01) {
    cv::Mat m(img01.h, img01.w, CV_8UC1);
    for (int y = 0; y < img01.h; ++y)
        for (int x = 0; x < img01.w; ++x)
            m.at<std::uint8_t>(y, x) =
                static_cast<std::uint8_t>(std::lround(std::clamp(img01.at(y, x), 0.f, 1.f) * 255.f));
    if (!cv::imwrite(path.string(), m)) throw IoError("cannot write image: " + path.string());
}

void write_png_gray16(const std::filesystem::path& path, const ImageF& img01) {
    cv::Mat m(img01.h, img01.w, CV_16UC1);
    for (int y = 0; y < img01.h; ++y)
        for (int x = 0; x < img01.w; ++x)
            m.at<std::uint16_t>(y, x) =
                static_cast<std::uint16_t>(std::lround(std::clamp(img01.at(y, x), 0.f, 1.f) * 65535.f));
    if (!cv::imwrite(path.string(), m)) throw IoError("cannot write image: " + path.string());
}

void write_png_mask(const std::filesystem::path& path, const BinaryMask& mask) {
    cv::Mat m(mask.h, mask.w, CV_8UC1);
    for (int y = 0; y < mask.h; ++y)
        for (int x = 0; x < mask.w; ++x) m.at<std::uint8_t>(y, x) = mask.at(y, x) ? 255 : 0;
    if (!cv::imwrite(path.string(), m)) throw IoError("cannot write image: " + path.string());
}

ImageF read_png_gray16(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw DataError("missing file: " + path.string());
    cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (m.empty()) throw DataError("cannot decode image: " + path.string());
    if (m.channels() != 1) cv::cvtColor(m, m, cv::COLOR_BGR2GRAY);
    ImageF out(m.rows, m.cols, 1);
    if (m.depth() == CV_16U) {
        for (int y = 0; y < m.rows; ++y)
            for (int x = 0; x < m.cols; ++x) out.at(y, x) = m.at<std::uint16_t>(y, x) / 65535.f;
    } else if (m.depth() == CV_8U) {
        for (int y = 0; y < m.rows; ++y)
            for (int x = 0; x < m.cols; ++x) out.at(y, x) = m.at<std::uint8_t>(y, x) / 255.f;
    } else {
        throw DataError("unsupported bit depth in " + path.string());
    }
    return out;
}

ImageF mask_to_float(const BinaryMask& m) {
    ImageF out(m.h, m.w, 1);
    for (std::size_t i = 0; i < m.px.size(); ++i) out.px[i] = m.px[i] ? 1.f : 0.f;
    return out;
}

BinaryMask float_to_mask(const ImageF& img, float threshold) {
    BinaryMask out(img.h, img.w, 1);
    for (std::size_t i = 0; i < img.px.size(); ++i) out.px[i] = img.px[i] >= threshold ? 1 : 0;
    return out;
}

}  // namespace awnet
