#ifndef LMK_DATASETS_HPP
#define LMK_DATASETS_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lmk/image.hpp"
#include "lmk/tensor.hpp"

namespace lmk {

/// K named (x, y) pixel-coordinate points with visibility flags and the pair
/// of indices used for the inter-ocular distance.
struct LandmarkSet {
    struct Point {
        double x = 0, y = 0;
    };
    std::vector<Point> points;
    std::vector<bool> visible;
    std::pair<int, int> eye_indices{-1, -1};

    int size() const { return static_cast<int>(points.size()); }
    bool has_eye_indices() const { return eye_indices.first >= 0 && eye_indices.second >= 0; }
    void validate() const;
};

struct ImageSample {
    Image image;
    std::optional<LandmarkSet> landmarks;
    int identity_id = -1;
    std::string source_path;

    /// Identity parameters for synthetic faces: re-rendering an identity
    /// under jitter keeps this vector byte-identical.
    std::vector<double> identity_params;
};

struct AugmentationConfig {
    int crop_size = 96;
    int resize_size = 136;
    std::pair<double, double> crop_scale_range{0.4, 1.0};
    double flip_prob = 0.5;
    double brightness = 0.4;
    double contrast = 0.4;
    double saturation = 0.2;
    double hue = 0.1;
    double color_jitter_prob = 0.8;
    double blur_prob = 0.5;
    double blur_sigma_max = 1.0;
    double solarize_prob_target_only = 0.2;
    std::uint64_t seed = 0;
    std::array<double, 3> norm_mean{kSyntheticMean};
    std::array<double, 3> norm_std{kSyntheticStd};

    // Channel statistics of the default 200-image synthetic set, frozen once.
    static constexpr std::array<double, 3> kSyntheticMean{0.5941, 0.4838, 0.4344};
    static constexpr std::array<double, 3> kSyntheticStd{0.2095, 0.1973, 0.2027};

    void validate() const;
};

/// Two augmented views of one sample. `geometry` maps query-view pixel
/// coordinates to key-view pixel coordinates; it exists whenever both views
/// are affine transforms of the source, which holds for this pipeline.
struct ViewPair {
    ImageSample query_view;  // x1, feeds the online branch
    ImageSample key_view;    // x2, feeds the momentum branch
    std::optional<Affine> geometry;
};

// ---------------------------------------------------------------------------
// Synthetic faces
// ---------------------------------------------------------------------------

struct FaceJitter {
    double dx = 0, dy = 0;
    double scale = 1.0;
};

/// Procedural face: head ellipse, eyes, nose, mouth on a shaded background.
/// Returns K=5 landmarks (left eye, right eye, nose tip, mouth corners),
/// eye_indices = (0, 1).
ImageSample generate_synthetic_face(std::uint64_t seed, int canvas);

/// Re-render the identity described by `params` under a pose/scale jitter.
ImageSample render_face(const std::vector<double>& params, int identity_id, int canvas,
                        const FaceJitter& jitter);

std::vector<double> face_params_from_seed(std::uint64_t seed);

/// Synthetic dataset: `n_identities` faces, `renders_per_identity` jittered
/// renders each, all deterministic in `seed`.
std::vector<ImageSample> make_synthetic_dataset(std::uint64_t seed, int n_identities,
                                                int renders_per_identity, int canvas);

// ---------------------------------------------------------------------------
// Disk datasets: root/images/*.png|jpg, optional root/landmarks.csv with
// header file,x0,y0,...,x{K-1},y{K-1}, optional root/pairs.txt with lines
// "ref_file query_file same|diff".
// ---------------------------------------------------------------------------

std::vector<ImageSample> load_dataset(const std::string& root, const std::string& annotations,
                                      std::pair<int, int> eye_indices);

/// Materialize samples in the standard layout (images/ + landmarks.csv).
void write_dataset(const std::vector<ImageSample>& samples, const std::string& root);

struct MatchingPair {
    int ref_index = -1;
    int query_index = -1;
    bool same_identity = false;
};

std::vector<MatchingPair> build_matching_pairs(const std::vector<ImageSample>& samples,
                                               int n_same, int n_diff, Rng& rng);

void write_pairs(const std::vector<ImageSample>& samples, const std::vector<MatchingPair>& pairs,
                 const std::string& path);
std::vector<MatchingPair> load_pairs(const std::vector<ImageSample>& samples,
                                     const std::string& path);

// ---------------------------------------------------------------------------
// Two-view augmentation
// ---------------------------------------------------------------------------

ViewPair make_two_views(const ImageSample& sample, const AugmentationConfig& cfg, Rng& rng);

/// Stream seed for a dataset worker: every worker owns an independent
/// generator derived from (global_seed, worker_id, epoch).
Rng worker_rng(std::uint64_t global_seed, int worker_id, int epoch);

/// Map landmarks through an affine view transform; points landing outside
/// [0,w)x[0,h) are marked invisible.
LandmarkSet transform_landmarks(const LandmarkSet& lm, const Affine& map, int out_w, int out_h);

}  // namespace lmk

#endif  // LMK_DATASETS_HPP
