#include "lmk/image.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <cmath>

#include "lmk/errors.hpp"

namespace lmk {

Affine Affine::inverse() const {
    const double det = a * d - b * c;
    if (std::abs(det) < 1e-300) throw std::invalid_argument("Affine::inverse: singular map");
    Affine inv;
    inv.a = d / det;
    inv.b = -b / det;
    inv.c = -c / det;
    inv.d = a / det;
    inv.tx = -(inv.a * tx + inv.b * ty);
    inv.ty = -(inv.c * tx + inv.d * ty);
    return inv;
}

Affine Affine::compose(const Affine& other) const {
    Affine r;
    r.a = a * other.a + b * other.c;
    r.b = a * other.b + b * other.d;
    r.c = c * other.a + d * other.c;
    r.d = c * other.b + d * other.d;
    r.tx = a * other.tx + b * other.ty + tx;
    r.ty = c * other.tx + d * other.ty + ty;
    return r;
}

static double sample_bilinear(const Image& src, double x, double y, int c) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double wx = x - x0, wy = y - y0;
    const int xc0 = std::clamp(x0, 0, src.w - 1), xc1 = std::clamp(x0 + 1, 0, src.w - 1);
    const int yc0 = std::clamp(y0, 0, src.h - 1), yc1 = std::clamp(y0 + 1, 0, src.h - 1);
    return (1 - wy) * ((1 - wx) * src.at(yc0, xc0, c) + wx * src.at(yc0, xc1, c)) +
           wy * ((1 - wx) * src.at(yc1, xc0, c) + wx * src.at(yc1, xc1, c));
}

Image warp_affine(const Image& src, const Affine& map, int out_h, int out_w) {
    const Affine inv = map.inverse();
    Image out(out_h, out_w);
    for (int y = 0; y < out_h; ++y)
        for (int x = 0; x < out_w; ++x) {
            // half-pixel centers keep the warp consistent with resize()
            const auto [sx, sy] = inv.apply(x + 0.5, y + 0.5);
            for (int c = 0; c < 3; ++c) out.at(y, x, c) = sample_bilinear(src, sx - 0.5, sy - 0.5, c);
        }
    return out;
}

Image resize(const Image& src, int out_h, int out_w) {
    Affine map = Affine::scaling(static_cast<double>(out_w) / src.w,
                                 static_cast<double>(out_h) / src.h);
    return warp_affine(src, map, out_h, out_w);
}

Image hflip(const Image& src) {
    Image out(src.h, src.w);
    for (int y = 0; y < src.h; ++y)
        for (int x = 0; x < src.w; ++x)
            for (int c = 0; c < 3; ++c) out.at(y, x, c) = src.at(y, src.w - 1 - x, c);
    return out;
}

Image adjust_brightness(const Image& img, double factor) {
    Image out = img;
    for (auto& v : out.data) v *= factor;
    clamp01(out);
    return out;
}

Image adjust_contrast(const Image& img, double factor) {
    double mean = 0.0;
    for (std::size_t i = 0; i < img.data.size(); i += 3)
        mean += 0.299 * img.data[i] + 0.587 * img.data[i + 1] + 0.114 * img.data[i + 2];
    mean /= static_cast<double>(img.data.size() / 3);
    Image out = img;
    for (auto& v : out.data) v = mean + (v - mean) * factor;
    clamp01(out);
    return out;
}

Image adjust_saturation(const Image& img, double factor) {
    Image out = img;
    for (std::size_t i = 0; i < img.data.size(); i += 3) {
        const double gray =
            0.299 * img.data[i] + 0.587 * img.data[i + 1] + 0.114 * img.data[i + 2];
        for (int c = 0; c < 3; ++c) out.data[i + c] = gray + (img.data[i + c] - gray) * factor;
    }
    clamp01(out);
    return out;
}

Image adjust_hue(const Image& img, double shift) {
    Image out = img;
    for (std::size_t i = 0; i < img.data.size(); i += 3) {
        double r = img.data[i], g = img.data[i + 1], b = img.data[i + 2];
        const double mx = std::max({r, g, b}), mn = std::min({r, g, b});
        const double v = mx, d = mx - mn;
        double h = 0.0;
        if (d > 1e-12) {
            if (mx == r)
                h = std::fmod((g - b) / d, 6.0);
            else if (mx == g)
                h = (b - r) / d + 2.0;
            else
                h = (r - g) / d + 4.0;
            h /= 6.0;
            if (h < 0) h += 1.0;
        }
        const double s = mx > 1e-12 ? d / mx : 0.0;
        h = std::fmod(h + shift + 1.0, 1.0);
        // HSV -> RGB
        const double hh = h * 6.0;
        const int sector = static_cast<int>(std::floor(hh)) % 6;
        const double f = hh - std::floor(hh);
        const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
        switch (sector) {
            case 0: r = v; g = t; b = p; break;
            case 1: r = q; g = v; b = p; break;
            case 2: r = p; g = v; b = t; break;
            case 3: r = p; g = q; b = v; break;
            case 4: r = t; g = p; b = v; break;
            default: r = v; g = p; b = q; break;
        }
        out.data[i] = r;
        out.data[i + 1] = g;
        out.data[i + 2] = b;
    }
    return out;
}

Image gaussian_blur(const Image& img, double sigma) {
    if (sigma <= 0.0) return img;
    const int radius = std::max(1, static_cast<int>(std::ceil(2.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (auto& k : kernel) k /= sum;

    Image tmp(img.h, img.w), out(img.h, img.w);
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x)
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i)
                    acc += kernel[i + radius] * img.at(y, std::clamp(x + i, 0, img.w - 1), c);
                tmp.at(y, x, c) = acc;
            }
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x)
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i)
                    acc += kernel[i + radius] * tmp.at(std::clamp(y + i, 0, img.h - 1), x, c);
                out.at(y, x, c) = acc;
            }
    return out;
}

Image solarize(const Image& img, double threshold) {
    Image out = img;
    for (auto& v : out.data)
        if (v >= threshold) v = 1.0 - v;
    return out;
}

void clamp01(Image& img) {
    for (auto& v : img.data) v = std::clamp(v, 0.0, 1.0);
}

Image load_image(const std::string& path) {
    cv::Mat m = cv::imread(path, cv::IMREAD_COLOR);
    if (m.empty()) throw MissingArtifactError("cannot read image: " + path);
    Image img(m.rows, m.cols);
    for (int y = 0; y < m.rows; ++y)
        for (int x = 0; x < m.cols; ++x) {
            const cv::Vec3b px = m.at<cv::Vec3b>(y, x);  // BGR
            img.at(y, x, 0) = px[2] / 255.0;
            img.at(y, x, 1) = px[1] / 255.0;
            img.at(y, x, 2) = px[0] / 255.0;
        }
    return img;
}

void save_image(const Image& img, const std::string& path) {
    cv::Mat m(img.h, img.w, CV_8UC3);
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x) {
            auto q = [&](int c) {
                return static_cast<unsigned char>(
                    std::lround(std::clamp(img.at(y, x, c), 0.0, 1.0) * 255.0));
            };
            m.at<cv::Vec3b>(y, x) = cv::Vec3b(q(2), q(1), q(0));
        }
    if (!cv::imwrite(path, m)) throw std::runtime_error("cannot write image: " + path);
}

Tensor to_nchw(const std::vector<const Image*>& images, const std::array<double, 3>& mean,
               const std::array<double, 3>& stddev) {
    if (images.empty()) throw std::invalid_argument("to_nchw: empty batch");
    const int h = images[0]->h, w = images[0]->w;
    const int n = static_cast<int>(images.size());
    Tensor t({n, 3, h, w});
    for (int i = 0; i < n; ++i) {
        const Image& img = *images[i];
        if (img.h != h || img.w != w) throw std::invalid_argument("to_nchw: mixed image sizes");
        for (int c = 0; c < 3; ++c) {
            double* dst = t.ptr() + ((static_cast<std::int64_t>(i) * 3 + c) * h) * w;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x)
                    dst[y * static_cast<std::int64_t>(w) + x] =
                        (img.at(y, x, c) - mean[c]) / stddev[c];
        }
    }
    return t;
}

}  // namespace lmk
