#include "lmk/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "lmk/errors.hpp"

namespace fs = std::filesystem;

namespace lmk {

void LandmarkSet::validate() const {
    if (points.size() != visible.size())
        throw ConfigError("LandmarkSet: points/visible size mismatch");
    if (has_eye_indices()) {
        const int k = size();
        if (k < 2) throw ConfigError("LandmarkSet: eye_indices require K >= 2");
        if (eye_indices.first >= k || eye_indices.second >= k ||
            eye_indices.first == eye_indices.second)
            throw ConfigError("LandmarkSet: eye_indices must name two distinct valid points");
    }
}

void AugmentationConfig::validate() const {
    auto check_prob = [](double p, const char* name) {
        if (p < 0.0 || p > 1.0) throw ConfigError(std::string("AugmentationConfig: ") + name +
                                                  " must lie in [0,1]");
    };
    check_prob(flip_prob, "flip_prob");
    check_prob(color_jitter_prob, "color_jitter_prob");
    check_prob(blur_prob, "blur_prob");
    check_prob(solarize_prob_target_only, "solarize_prob_target_only");
    if (crop_size <= 0 || resize_size <= 0 || crop_size > resize_size)
        throw ConfigError("AugmentationConfig: need 0 < crop_size <= resize_size");
    if (crop_scale_range.first <= 0.0 || crop_scale_range.first > crop_scale_range.second ||
        crop_scale_range.second > 1.0)
        throw ConfigError("AugmentationConfig: crop_scale_range must satisfy 0 < min <= max <= 1");
}

// ---------------------------------------------------------------------------
// Synthetic faces
// ---------------------------------------------------------------------------

namespace {

// Identity parameter layout (fractions of canvas unless noted).
enum FaceParam {
    kFaceRx,
    kFaceRy,
    kEyeHeight,   // eye row above center
    kEyeSpacing,  // half distance between eye centers
    kEyeRadius,
    kPupilRatio,
    kNoseTipY,  // nose tip below center
    kNoseWidth,
    kMouthY,  // mouth ellipse center below face center
    kMouthRx,
    kMouthRy,
    kMouthThickness,
    kSkinR,
    kSkinG,
    kSkinB,
    kBgR,
    kBgG,
    kBgB,
    kIrisR,
    kIrisG,
    kIrisB,
    kLipR,
    kLipG,
    kLipB,
    kFaceParamCount
};

double smooth_cov(double signed_dist, double feather) {
    // coverage 1 deep inside (negative distance), 0 outside
    const double t = std::clamp(0.5 - signed_dist / feather, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

void blend(Image& img, int y, int x, double cov, double r, double g, double b) {
    if (cov <= 0.0) return;
    img.at(y, x, 0) = (1 - cov) * img.at(y, x, 0) + cov * r;
    img.at(y, x, 1) = (1 - cov) * img.at(y, x, 1) + cov * g;
    img.at(y, x, 2) = (1 - cov) * img.at(y, x, 2) + cov * b;
}

double ellipse_dist(double px, double py, double cx, double cy, double rx, double ry) {
    // approximate signed distance, exact on axes; fine for rendering
    const double dx = (px - cx) / rx, dy = (py - cy) / ry;
    const double q = std::sqrt(dx * dx + dy * dy);
    return (q - 1.0) * std::min(rx, ry);
}

double segment_dist(double px, double py, double x0, double y0, double x1,
                    double y1) {
    const double vx = x1 - x0, vy = y1 - y0;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0 ? ((px - x0) * vx + (py - y0) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = px - (x0 + t * vx), dy = py - (y0 + t * vy);
    return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

std::vector<double> face_params_from_seed(std::uint64_t seed) {
    Rng rng(mix_seed({seed, 0xFACEull}));
    std::vector<double> p(kFaceParamCount);
    p[kFaceRx] = rng.uniform(0.28, 0.36);
    p[kFaceRy] = rng.uniform(0.34, 0.42);
    p[kEyeHeight] = rng.uniform(0.08, 0.14);
    p[kEyeSpacing] = rng.uniform(0.10, 0.16);
    p[kEyeRadius] = rng.uniform(0.030, 0.048);
    p[kPupilRatio] = rng.uniform(0.35, 0.55);
    p[kNoseTipY] = rng.uniform(0.03, 0.09);
    p[kNoseWidth] = rng.uniform(0.012, 0.024);
    p[kMouthY] = rng.uniform(0.17, 0.24);
    p[kMouthRx] = rng.uniform(0.08, 0.14);
    p[kMouthRy] = rng.uniform(0.03, 0.06);
    p[kMouthThickness] = rng.uniform(0.010, 0.020);
    p[kSkinR] = rng.uniform(0.55, 0.95);
    p[kSkinG] = p[kSkinR] * rng.uniform(0.72, 0.88);
    p[kSkinB] = p[kSkinG] * rng.uniform(0.75, 0.92);
    p[kBgR] = rng.uniform(0.05, 0.45);
    p[kBgG] = rng.uniform(0.05, 0.45);
    p[kBgB] = rng.uniform(0.25, 0.65);
    p[kIrisR] = rng.uniform(0.05, 0.55);
    p[kIrisG] = rng.uniform(0.15, 0.55);
    p[kIrisB] = rng.uniform(0.25, 0.75);
    p[kLipR] = rng.uniform(0.55, 0.85);
    p[kLipG] = rng.uniform(0.15, 0.35);
    p[kLipB] = rng.uniform(0.15, 0.35);
    return p;
}

ImageSample render_face(const std::vector<double>& params, int identity_id, int canvas,
                        const FaceJitter& jitter) {
    if (canvas < 32) throw ConfigError("render_face: canvas must be >= 32");
    if (params.size() != kFaceParamCount) throw ConfigError("render_face: bad parameter vector");
    const auto& p = params;
    const double s = canvas * jitter.scale;
    const double cx = canvas / 2.0 + jitter.dx * canvas;
    const double cy = canvas / 2.0 + jitter.dy * canvas;
    const double feather = std::max(1.0, canvas / 96.0);

    Image img(canvas, canvas);
    for (int y = 0; y < canvas; ++y) {
        const double shade = 0.85 + 0.3 * (static_cast<double>(y) / canvas);
        for (int x = 0; x < canvas; ++x) {
            img.at(y, x, 0) = std::clamp(p[kBgR] * shade, 0.0, 1.0);
            img.at(y, x, 1) = std::clamp(p[kBgG] * shade, 0.0, 1.0);
            img.at(y, x, 2) = std::clamp(p[kBgB] * shade, 0.0, 1.0);
        }
    }

    const double eye_y = cy - p[kEyeHeight] * s;
    const double eye_lx = cx - p[kEyeSpacing] * s;
    const double eye_rx = cx + p[kEyeSpacing] * s;
    const double eye_r = p[kEyeRadius] * s;
    const double nose_top_y = eye_y + 0.02 * s;
    const double nose_tip_y = cy + p[kNoseTipY] * s;
    const double mouth_cy = cy + p[kMouthY] * s;
    const double mouth_rx = p[kMouthRx] * s;
    const double mouth_ry = p[kMouthRy] * s;
    const double mouth_th = p[kMouthThickness] * s;

    for (int y = 0; y < canvas; ++y)
        for (int x = 0; x < canvas; ++x) {
            const double px = x + 0.5, py = y + 0.5;
            // head
            double d = ellipse_dist(px, py, cx, cy, p[kFaceRx] * s, p[kFaceRy] * s);
            blend(img, y, x, smooth_cov(d, feather), p[kSkinR], p[kSkinG], p[kSkinB]);
            // eyes: sclera, iris, pupil
            for (const double ex : {eye_lx, eye_rx}) {
                d = ellipse_dist(px, py, ex, eye_y, eye_r * 1.4, eye_r);
                blend(img, y, x, smooth_cov(d, feather), 0.95, 0.95, 0.93);
                d = ellipse_dist(px, py, ex, eye_y, eye_r * 0.8, eye_r * 0.8);
                blend(img, y, x, smooth_cov(d, feather), p[kIrisR], p[kIrisG], p[kIrisB]);
                const double pr = eye_r * 0.8 * p[kPupilRatio];
                d = ellipse_dist(px, py, ex, eye_y, pr, pr);
                blend(img, y, x, smooth_cov(d, feather), 0.05, 0.05, 0.05);
            }
            // nose: darker capsule from bridge to tip
            d = segment_dist(px, py, cx, nose_top_y, cx, nose_tip_y) - p[kNoseWidth] * s;
            blend(img, y, x, 0.6 * smooth_cov(d, feather), p[kSkinR] * 0.6, p[kSkinG] * 0.6,
                  p[kSkinB] * 0.6);
            // mouth: lower half of an ellipse ring
            if (py >= mouth_cy - feather) {
                const double dxm = (px - cx) / mouth_rx, dym = (py - mouth_cy) / mouth_ry;
                const double q = std::sqrt(dxm * dxm + dym * dym);
                d = (std::abs(q - 1.0)) * std::min(mouth_rx, mouth_ry) - mouth_th;
                blend(img, y, x, smooth_cov(d, feather), p[kLipR], p[kLipG], p[kLipB]);
            }
        }

    ImageSample sample;
    sample.image = std::move(img);
    sample.identity_id = identity_id;
    sample.identity_params = params;
    LandmarkSet lm;
    lm.points = {{eye_lx, eye_y},
                 {eye_rx, eye_y},
                 {cx, nose_tip_y},
                 {cx - mouth_rx, mouth_cy},
                 {cx + mouth_rx, mouth_cy}};
    lm.visible.assign(5, true);
    lm.eye_indices = {0, 1};
    lm.validate();
    sample.landmarks = std::move(lm);
    return sample;
}

ImageSample generate_synthetic_face(std::uint64_t seed, int canvas) {
    return render_face(face_params_from_seed(seed), static_cast<int>(seed), canvas, FaceJitter{});
}

std::vector<ImageSample> make_synthetic_dataset(std::uint64_t seed, int n_identities,
                                                int renders_per_identity, int canvas) {
    if (n_identities < 1 || renders_per_identity < 1)
        throw ConfigError("make_synthetic_dataset: counts must be >= 1");
    std::vector<ImageSample> out;
    out.reserve(static_cast<std::size_t>(n_identities) * renders_per_identity);
    for (int i = 0; i < n_identities; ++i) {
        const auto params = face_params_from_seed(mix_seed({seed, static_cast<std::uint64_t>(i)}));
        for (int j = 0; j < renders_per_identity; ++j) {
            FaceJitter jitter;
            if (j > 0) {
                Rng rng(mix_seed({seed, static_cast<std::uint64_t>(i),
                                  static_cast<std::uint64_t>(j), 0x11FFull}));
                jitter.dx = rng.uniform(-0.05, 0.05);
                jitter.dy = rng.uniform(-0.05, 0.05);
                jitter.scale = rng.uniform(0.9, 1.1);
            }
            out.push_back(render_face(params, i, canvas, jitter));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Disk datasets
// ---------------------------------------------------------------------------

namespace {

int identity_from_filename(const std::string& name, int fallback) {
    // convention: files named id0003_r01.png carry the identity in the name
    if (name.rfind("id", 0) == 0) {
        std::size_t i = 2;
        int v = 0;
        bool any = false;
        while (i < name.size() && std::isdigit(static_cast<unsigned char>(name[i]))) {
            v = v * 10 + (name[i] - '0');
            any = true;
            ++i;
        }
        if (any) return v;
    }
    return fallback;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::vector<ImageSample> load_dataset(const std::string& root, const std::string& annotations,
                                      std::pair<int, int> eye_indices) {
    const fs::path images_dir = fs::path(root) / "images";
    if (!fs::is_directory(images_dir))
        throw MissingArtifactError("dataset images directory not found: " + images_dir.string());

    std::vector<ImageSample> samples;
    if (annotations.empty()) {
        std::vector<std::string> files;
        for (const auto& e : fs::directory_iterator(images_dir)) {
            const std::string ext = e.path().extension().string();
            if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") files.push_back(e.path().string());
        }
        std::sort(files.begin(), files.end());
        int idx = 0;
        for (const auto& f : files) {
            ImageSample s;
            s.image = load_image(f);
            s.source_path = f;
            s.identity_id = identity_from_filename(fs::path(f).filename().string(), idx);
            samples.push_back(std::move(s));
            ++idx;
        }
        return samples;
    }

    std::ifstream in(annotations);
    if (!in) throw MissingArtifactError("annotation file not found: " + annotations);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("annotation file is empty: " + annotations);
    const auto header = split_csv_line(line);
    if (header.empty() || header[0] != "file" || header.size() < 5 || header.size() % 2 == 0)
        throw ConfigError("annotation header must be file,x0,y0,...,x{K-1},y{K-1}: " + annotations);
    const int k = static_cast<int>((header.size() - 1) / 2);
    if (eye_indices.first < 0 || eye_indices.first >= k || eye_indices.second < 0 ||
        eye_indices.second >= k || eye_indices.first == eye_indices.second)
        throw ConfigError("eye_indices out of range for K=" + std::to_string(k));

    int line_no = 1;
    int idx = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) != 1 + 2 * k)
            throw ConfigError("annotation line " + std::to_string(line_no) + ": expected " +
                              std::to_string(1 + 2 * k) + " columns, got " +
                              std::to_string(cells.size()));
        const fs::path img_path = images_dir / cells[0];
        if (!fs::exists(img_path))
            throw MissingArtifactError("annotation line " + std::to_string(line_no) +
                                       " references missing image: " + img_path.string());
        ImageSample s;
        s.image = load_image(img_path.string());
        s.source_path = img_path.string();
        s.identity_id = identity_from_filename(cells[0], idx);
        LandmarkSet lm;
        lm.eye_indices = eye_indices;
        for (int i = 0; i < k; ++i) {
            LandmarkSet::Point pt;
            try {
                std::size_t pos = 0;
                pt.x = std::stod(cells[1 + 2 * i], &pos);
                if (pos != cells[1 + 2 * i].size()) throw std::invalid_argument("trailing");
                pt.y = std::stod(cells[2 + 2 * i], &pos);
                if (pos != cells[2 + 2 * i].size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw ConfigError("annotation line " + std::to_string(line_no) +
                                  ": malformed coordinate for point " + std::to_string(i));
            }
            lm.points.push_back(pt);
            lm.visible.push_back(pt.x >= 0 && pt.x < s.image.w && pt.y >= 0 && pt.y < s.image.h);
        }
        lm.validate();
        s.landmarks = std::move(lm);
        samples.push_back(std::move(s));
        ++idx;
    }
    return samples;
}

void write_dataset(const std::vector<ImageSample>& samples, const std::string& root) {
    const fs::path images_dir = fs::path(root) / "images";
    fs::create_directories(images_dir);

    std::map<int, int> render_counter;
    std::vector<std::string> names;
    names.reserve(samples.size());
    int k = -1;
    for (const auto& s : samples) {
        const int r = render_counter[s.identity_id]++;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "id%04d_r%02d.png", s.identity_id, r);
        names.emplace_back(buf);
        save_image(s.image, (images_dir / buf).string());
        if (s.landmarks) {
            if (k < 0) k = s.landmarks->size();
            if (k != s.landmarks->size())
                throw ConfigError("write_dataset: inconsistent landmark counts");
        }
    }
    if (k > 0) {
        std::ofstream csv(fs::path(root) / "landmarks.csv");
        csv << "file";
        for (int i = 0; i < k; ++i) csv << ",x" << i << ",y" << i;
        csv << "\n";
        char num[32];
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (!samples[i].landmarks) continue;
            csv << names[i];
            for (const auto& pt : samples[i].landmarks->points) {
                std::snprintf(num, sizeof(num), ",%.4f,%.4f", pt.x, pt.y);
                csv << num;
            }
            csv << "\n";
        }
    }
}

std::vector<MatchingPair> build_matching_pairs(const std::vector<ImageSample>& samples,
                                               int n_same, int n_diff, Rng& rng) {
    std::map<int, std::vector<int>> by_identity;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (samples[i].landmarks) by_identity[samples[i].identity_id].push_back(static_cast<int>(i));

    std::vector<int> multi_render;
    for (const auto& [id, idxs] : by_identity)
        if (idxs.size() >= 2) multi_render.push_back(id);

    if (n_same > 0 && multi_render.empty())
        throw ConfigError("build_matching_pairs: " + std::to_string(n_same) +
                          " same-identity pairs requested but no identity has 2 annotated renders");
    if (n_diff > 0 && by_identity.size() < 2)
        throw ConfigError("build_matching_pairs: " + std::to_string(n_diff) +
                          " different-identity pairs requested but only " +
                          std::to_string(by_identity.size()) + " identities available (need 2)");

    std::vector<int> identities;
    for (const auto& [id, idxs] : by_identity) identities.push_back(id);

    std::vector<MatchingPair> pairs;
    pairs.reserve(static_cast<std::size_t>(n_same) + n_diff);
    for (int i = 0; i < n_same; ++i) {
        const int id = multi_render[rng.uniform_int(0, static_cast<int>(multi_render.size()) - 1)];
        const auto& idxs = by_identity[id];
        const int a = rng.uniform_int(0, static_cast<int>(idxs.size()) - 1);
        int b = rng.uniform_int(0, static_cast<int>(idxs.size()) - 2);
        if (b >= a) ++b;
        pairs.push_back({idxs[a], idxs[b], true});
    }
    for (int i = 0; i < n_diff; ++i) {
        const int ia = rng.uniform_int(0, static_cast<int>(identities.size()) - 1);
        int ib = rng.uniform_int(0, static_cast<int>(identities.size()) - 2);
        if (ib >= ia) ++ib;
        const auto& va = by_identity[identities[ia]];
        const auto& vb = by_identity[identities[ib]];
        pairs.push_back({va[rng.uniform_int(0, static_cast<int>(va.size()) - 1)],
                         vb[rng.uniform_int(0, static_cast<int>(vb.size()) - 1)], false});
    }
    return pairs;
}

void write_pairs(const std::vector<ImageSample>& samples, const std::vector<MatchingPair>& pairs,
                 const std::string& path) {
    std::ofstream out(path);
    for (const auto& p : pairs) {
        out << fs::path(samples[p.ref_index].source_path).filename().string() << " "
            << fs::path(samples[p.query_index].source_path).filename().string() << " "
            << (p.same_identity ? "same" : "diff") << "\n";
    }
}

std::vector<MatchingPair> load_pairs(const std::vector<ImageSample>& samples,
                                     const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifactError("pairs file not found: " + path);
    std::map<std::string, int> by_name;
    for (std::size_t i = 0; i < samples.size(); ++i)
        by_name[fs::path(samples[i].source_path).filename().string()] = static_cast<int>(i);

    std::vector<MatchingPair> pairs;
    std::string ref, query, kind;
    int line_no = 0;
    while (in >> ref >> query >> kind) {
        ++line_no;
        const auto ri = by_name.find(ref), qi = by_name.find(query);
        if (ri == by_name.end() || qi == by_name.end())
            throw ConfigError("pairs line " + std::to_string(line_no) +
                              " references unknown image " + (ri == by_name.end() ? ref : query));
        if (kind != "same" && kind != "diff")
            throw ConfigError("pairs line " + std::to_string(line_no) + ": bad kind " + kind);
        pairs.push_back({ri->second, qi->second, kind == "same"});
    }
    return pairs;
}

// ---------------------------------------------------------------------------
// Two-view augmentation
// ---------------------------------------------------------------------------

namespace {

struct ViewDraw {
    double crop_scale;
    double crop_x, crop_y;  // fractions of the slack
    bool flip;
    bool jitter_on;
    double brightness, contrast, saturation, hue;
    bool blur_on;
    double blur_sigma;
    bool solarize_on;
};

// All random numbers for one view are drawn up front in a fixed order, so the
// augmented output is a pure function of (sample, cfg, draw).
ViewDraw draw_view(const AugmentationConfig& cfg, Rng& rng) {
    ViewDraw d;
    d.crop_scale = rng.uniform(cfg.crop_scale_range.first, cfg.crop_scale_range.second);
    d.crop_x = rng.uniform();
    d.crop_y = rng.uniform();
    d.flip = rng.bernoulli(cfg.flip_prob);
    d.jitter_on = rng.bernoulli(cfg.color_jitter_prob);
    d.brightness = rng.uniform(std::max(0.0, 1.0 - cfg.brightness), 1.0 + cfg.brightness);
    d.contrast = rng.uniform(std::max(0.0, 1.0 - cfg.contrast), 1.0 + cfg.contrast);
    d.saturation = rng.uniform(std::max(0.0, 1.0 - cfg.saturation), 1.0 + cfg.saturation);
    d.hue = rng.uniform(-cfg.hue, cfg.hue);
    d.blur_on = rng.bernoulli(cfg.blur_prob);
    d.blur_sigma = rng.uniform(0.1, cfg.blur_sigma_max);
    d.solarize_on = rng.bernoulli(cfg.solarize_prob_target_only);
    return d;
}

struct BuiltView {
    Image image;
    Affine geometry;  // source pixels -> view pixels
};

BuiltView build_view(const Image& source, const AugmentationConfig& cfg, const ViewDraw& d,
                     bool is_key) {
    // resize to the working size (upscales small inputs, never fails)
    const Affine to_resized = Affine::scaling(static_cast<double>(cfg.resize_size) / source.w,
                                              static_cast<double>(cfg.resize_size) / source.h);
    // area-fraction square crop
    const int side = std::clamp(
        static_cast<int>(std::lround(std::sqrt(d.crop_scale) * cfg.resize_size)), 1,
        cfg.resize_size);
    const int max_off = cfg.resize_size - side;
    const int x0 = static_cast<int>(std::floor(d.crop_x * (max_off + 1) * (1.0 - 1e-12)));
    const int y0 = static_cast<int>(std::floor(d.crop_y * (max_off + 1) * (1.0 - 1e-12)));
    Affine crop = Affine::scaling(static_cast<double>(cfg.crop_size) / side,
                                  static_cast<double>(cfg.crop_size) / side)
                      .compose(Affine::translation(-x0, -y0));
    Affine geom = crop.compose(to_resized);
    if (d.flip) {
        const Affine mirror{-1, 0, 0, 1, static_cast<double>(cfg.crop_size), 0};
        geom = mirror.compose(geom);
    }

    BuiltView v;
    v.geometry = geom;
    v.image = warp_affine(source, geom, cfg.crop_size, cfg.crop_size);
    if (d.jitter_on) {
        v.image = adjust_brightness(v.image, d.brightness);
        v.image = adjust_contrast(v.image, d.contrast);
        v.image = adjust_saturation(v.image, d.saturation);
        v.image = adjust_hue(v.image, d.hue);
    }
    if (d.blur_on) v.image = gaussian_blur(v.image, d.blur_sigma);
    if (is_key && d.solarize_on) v.image = solarize(v.image);
    return v;
}

}  // namespace

LandmarkSet transform_landmarks(const LandmarkSet& lm, const Affine& map, int out_w, int out_h) {
    LandmarkSet out = lm;
    for (int i = 0; i < lm.size(); ++i) {
        const auto [x, y] = map.apply(lm.points[i].x, lm.points[i].y);
        out.points[i] = {x, y};
        out.visible[i] = lm.visible[i] && x >= 0 && x < out_w && y >= 0 && y < out_h;
    }
    return out;
}

ViewPair make_two_views(const ImageSample& sample, const AugmentationConfig& cfg, Rng& rng) {
    cfg.validate();
    if (sample.image.h <= 0 || sample.image.w <= 0)
        throw ConfigError("make_two_views: empty image");

    const ViewDraw dq = draw_view(cfg, rng);
    const ViewDraw dk = draw_view(cfg, rng);
    BuiltView q = build_view(sample.image, cfg, dq, /*is_key=*/false);
    BuiltView k = build_view(sample.image, cfg, dk, /*is_key=*/true);

    ViewPair pair;
    pair.query_view.image = std::move(q.image);
    pair.key_view.image = std::move(k.image);
    pair.query_view.identity_id = sample.identity_id;
    pair.key_view.identity_id = sample.identity_id;
    pair.query_view.identity_params = sample.identity_params;
    pair.key_view.identity_params = sample.identity_params;
    if (sample.landmarks) {
        pair.query_view.landmarks =
            transform_landmarks(*sample.landmarks, q.geometry, cfg.crop_size, cfg.crop_size);
        pair.key_view.landmarks =
            transform_landmarks(*sample.landmarks, k.geometry, cfg.crop_size, cfg.crop_size);
    }
    pair.geometry = k.geometry.compose(q.geometry.inverse());
    return pair;
}

Rng worker_rng(std::uint64_t global_seed, int worker_id, int epoch) {
    return Rng(mix_seed({global_seed, static_cast<std::uint64_t>(worker_id),
                         static_cast<std::uint64_t>(epoch)}));
}

}  // namespace lmk
