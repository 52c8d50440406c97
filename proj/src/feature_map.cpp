#include "lmk/feature_map.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>
#include <stdexcept>

#include "lmk/errors.hpp"

namespace lmk {

void warn(const std::string& msg) {
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    std::cerr << "[warn] " << msg << "\n";
}

GridCoord FeatureMap::pixel_to_cell(double px, double py) const {
    GridCoord g;
    g.x = std::clamp(static_cast<int>(std::floor(px / downscale)), 0, w - 1);
    g.y = std::clamp(static_cast<int>(std::floor(py / downscale)), 0, h - 1);
    return g;
}

double SimilarityDistribution::entropy() const {
    double e = 0.0;
    for (double p : mass)
        if (p > 0.0) e -= p * std::log(p);
    return e;
}

GridCoord SimilarityDistribution::argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < mass.size(); ++i)
        if (mass[i] > mass[best]) best = i;
    return {static_cast<int>(best % static_cast<std::size_t>(w)),
            static_cast<int>(best / static_cast<std::size_t>(w))};
}

FeatureMap feature_map_from_nchw(const Tensor& t, int sample, int downscale, int source_h,
                                 int source_w) {
    if (t.ndim() != 4) throw std::invalid_argument("feature_map_from_nchw: expected NCHW");
    const int c = t.dim(1), h = t.dim(2), w = t.dim(3);
    FeatureMap f(h, w, c, downscale, source_h, source_w);
    const double* base = t.ptr() + static_cast<std::int64_t>(sample) * c * h * w;
    for (int ch = 0; ch < c; ++ch)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                f.data[(static_cast<std::size_t>(y) * w + x) * c + ch] =
                    base[(static_cast<std::int64_t>(ch) * h + y) * w + x];
    return f;
}

}  // namespace lmk
