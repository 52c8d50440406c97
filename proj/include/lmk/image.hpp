#ifndef LMK_IMAGE_HPP
#define LMK_IMAGE_HPP

#include <array>
#include <string>
#include <vector>

#include "lmk/tensor.hpp"

namespace lmk {

/// RGB image, interleaved row-major, values in [0, 1].
struct Image {
    int h = 0, w = 0;
    std::vector<double> data;

    Image() = default;
    Image(int h_, int w_) : h(h_), w(w_), data(static_cast<std::size_t>(h_) * w_ * 3, 0.0) {}

    double& at(int y, int x, int c) { return data[(static_cast<std::size_t>(y) * w + x) * 3 + c]; }
    double at(int y, int x, int c) const {
        return data[(static_cast<std::size_t>(y) * w + x) * 3 + c];
    }
};

/// 2x3 affine map from source pixel coordinates to destination pixel
/// coordinates: dst = A * src + b.
struct Affine {
    // | a b | * (x, y) + (tx, ty)
    // | c d |
    double a = 1, b = 0, c = 0, d = 1, tx = 0, ty = 0;

    std::array<double, 2> apply(double x, double y) const {
        return {a * x + b * y + tx, c * x + d * y + ty};
    }
    Affine inverse() const;
    /// this ∘ other: apply `other` first.
    Affine compose(const Affine& other) const;

    static Affine identity() { return {}; }
    static Affine translation(double tx, double ty) { return {1, 0, 0, 1, tx, ty}; }
    static Affine scaling(double sx, double sy) { return {sx, 0, 0, sy, 0, 0}; }
};

/// Bilinear warp: out(x, y) = src(inv(x, y)) where `map` sends source pixels
/// to destination pixels. Out-of-bounds samples clamp to the border.
Image warp_affine(const Image& src, const Affine& map, int out_h, int out_w);

Image resize(const Image& src, int out_h, int out_w);
Image hflip(const Image& src);

// Photometric ops (in-place variants return the adjusted copy).
Image adjust_brightness(const Image& img, double factor);
Image adjust_contrast(const Image& img, double factor);
Image adjust_saturation(const Image& img, double factor);
Image adjust_hue(const Image& img, double shift);  // shift in [-0.5, 0.5] turns
Image gaussian_blur(const Image& img, double sigma);
Image solarize(const Image& img, double threshold = 0.5);
void clamp01(Image& img);

/// PNG / JPG round trip through 8-bit. Throws MissingArtifactError when the
/// file cannot be read.
Image load_image(const std::string& path);
void save_image(const Image& img, const std::string& path);

/// Stack images into an (N, 3, H, W) tensor applying per-channel
/// normalization x' = (x - mean) / std.
Tensor to_nchw(const std::vector<const Image*>& images, const std::array<double, 3>& mean,
               const std::array<double, 3>& stddev);

}  // namespace lmk

#endif  // LMK_IMAGE_HPP
