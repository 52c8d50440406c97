#ifndef LMK_FEATURE_MAP_HPP
#define LMK_FEATURE_MAP_HPP

#include <utility>
#include <vector>

#include "lmk/tensor.hpp"

namespace lmk {

/// Integer grid cell on a feature map; x is the column, y the row.
struct GridCoord {
    int x = 0;
    int y = 0;
    bool operator==(const GridCoord&) const = default;
};

/// Spatial grid of channel vectors at an explicit downscale relative to the
/// source image. Stored position-major: data[(y*w + x)*channels + c], so the
/// map doubles as an (h*w) x channels row-major matrix.
struct FeatureMap {
    int h = 0, w = 0, channels = 0;
    int downscale = 1;
    int source_h = 0, source_w = 0;
    std::vector<double> data;

    FeatureMap() = default;
    FeatureMap(int h_, int w_, int c_, int downscale_, int src_h, int src_w)
        : h(h_),
          w(w_),
          channels(c_),
          downscale(downscale_),
          source_h(src_h),
          source_w(src_w),
          data(static_cast<std::size_t>(h_) * w_ * c_, 0.0) {}

    int positions() const { return h * w; }

    double* cell(int y, int x) { return data.data() + (static_cast<std::size_t>(y) * w + x) * channels; }
    const double* cell(int y, int x) const {
        return data.data() + (static_cast<std::size_t>(y) * w + x) * channels;
    }
    const double* cell(GridCoord g) const { return cell(g.y, g.x); }

    /// Center of a grid cell in source-image pixel coordinates.
    std::pair<double, double> cell_center_px(GridCoord g) const {
        return {(g.x + 0.5) * downscale, (g.y + 0.5) * downscale};
    }

    /// Grid cell containing a source-image pixel, clamped to the border.
    GridCoord pixel_to_cell(double px, double py) const;
};

/// Probability mass over a feature-map grid produced by a temperature softmax
/// of feature similarities against one source cell.
struct SimilarityDistribution {
    int h = 0, w = 0;
    GridCoord source;
    double temperature = 1.0;
    std::vector<double> mass;  // h*w, row-major, sums to 1

    double at(int y, int x) const { return mass[static_cast<std::size_t>(y) * w + x]; }
    double entropy() const;
    GridCoord argmax() const;
};

/// Slice one sample out of an (N, C, H, W) tensor into a position-major map.
FeatureMap feature_map_from_nchw(const Tensor& t, int sample, int downscale, int source_h,
                                 int source_w);

}  // namespace lmk

#endif  // LMK_FEATURE_MAP_HPP
