#include "awnet/data/fov.hpp"

#include <opencv2/imgproc.hpp>

namespace awnet {

namespace {
constexpr int kMinBrightness = 10;  // max luminance below this -> frame is dark
}

BinaryMask extract_fov_mask(const ImageU8& image) {
    if (image.channels != 3) throw DataError("fov extraction expects a 3-channel raster");
    cv::Mat gray(image.h, image.w, CV_8UC1);
    int max_lum = 0;
    for (int y = 0; y < image.h; ++y)
        for (int x = 0; x < image.w; ++x) {
            const int lum = static_cast<int>(0.299 * image.at(y, x, 0) + 0.587 * image.at(y, x, 1) +
                                             0.114 * image.at(y, x, 2));
            gray.at<std::uint8_t>(y, x) = static_cast<std::uint8_t>(lum);
            max_lum = std::max(max_lum, lum);
        }
    if (max_lum < kMinBrightness)
        throw DataError("fov extraction failed: image is essentially dark (max luminance " +
                        std::to_string(max_lum) + ")");

    cv::Mat bin;
    cv::threshold(gray, bin, 0, 255, cv::THRESH_BINARY | cv::THRESH_OTSU);
    // A constant bright frame has no Otsu split; treat it as fully illuminated.
    if (cv::countNonZero(bin) == 0) bin.setTo(255);

    // Close before picking the component: dark vessels crossing the rim would
    // otherwise split the illuminated region.
    const cv::Mat disk = cv::getStructuringElement(cv::MORPH_ELLIPSE, cv::Size(21, 21));
    cv::Mat closed;
    cv::morphologyEx(bin, closed, cv::MORPH_CLOSE, disk);

    cv::Mat labels, stats, centroids;
    const int ncomp = cv::connectedComponentsWithStats(closed, labels, stats, centroids, 8);
    int best = -1, best_area = 0;
    for (int i = 1; i < ncomp; ++i) {
        const int area = stats.at<int>(i, cv::CC_STAT_AREA);
        if (area > best_area) {
            best_area = area;
            best = i;
        }
    }
    if (best < 0) throw DataError("fov extraction failed: no foreground component");
    cv::Mat largest;
    cv::compare(labels, best, largest, cv::CMP_EQ);

    // Fill interior holes (vessel pixels below the threshold): everything not
    // reachable from the border background belongs to the field of view.
    cv::Mat inv;
    cv::bitwise_not(largest, inv);
    cv::Mat bg_labels;
    const int nbg = cv::connectedComponents(inv, bg_labels, 8);
    std::vector<char> touches_border(nbg, 0);
    for (int x = 0; x < inv.cols; ++x) {
        touches_border[bg_labels.at<int>(0, x)] = 1;
        touches_border[bg_labels.at<int>(inv.rows - 1, x)] = 1;
    }
    for (int y = 0; y < inv.rows; ++y) {
        touches_border[bg_labels.at<int>(y, 0)] = 1;
        touches_border[bg_labels.at<int>(y, inv.cols - 1)] = 1;
    }

    BinaryMask out(image.h, image.w, 1);
    for (int y = 0; y < image.h; ++y)
        for (int x = 0; x < image.w; ++x) {
            const bool fg = largest.at<std::uint8_t>(y, x) != 0;
            const bool hole = !fg && !touches_border[bg_labels.at<int>(y, x)];
            out.at(y, x) = (fg || hole) ? 1 : 0;
        }
    return out;
}

double mask_fraction(const BinaryMask& m) {
    if (m.px.empty()) return 0.0;
    std::size_t on = 0;
    for (auto v : m.px) on += v ? 1 : 0;
    return static_cast<double>(on) / static_cast<double>(m.px.size());
}

}  // namespace awnet
