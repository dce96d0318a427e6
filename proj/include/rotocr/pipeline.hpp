#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "rotocr/backend.hpp"
#include "rotocr/geometry.hpp"
#include "rotocr/imaging.hpp"

namespace rotocr {

/// Views {i * step : i = 0 .. 360/step - 1}; 360 itself is the 0 view and is
/// not repeated.
struct RotationSet {
    double step = 15.0;
    std::vector<double> angles;
};

/// Throws Error(Config) unless step is in (0, 360] and divides 360.
RotationSet build_rotation_set(double step);

/// Mean of detector and recognizer confidence. Throws Error(InvalidInput)
/// outside [0, 1].
double fuse_score(double det_score, double rec_score);

/// A detection mapped back into the original frame.
struct MergeCandidate {
    Quad box;
    std::string text;
    double det_score = 0.0;
    double rec_score = 0.0;
    double score = 0.0;  // fuse_score(det_score, rec_score)
    double source_angle = 0.0;

    friend bool operator==(const MergeCandidate&, const MergeCandidate&) = default;
};

struct PipelineConfig {
    double rotation_step = 15.0;
    double nms_iou = 0.5;
    BackendConfig backend;
    int jobs = 1;

    void validate() const;
};

/// Strict weak ordering used by NMS: score descending, then source angle
/// ascending, then text, then box coordinates.
bool nms_before(const MergeCandidate& a, const MergeCandidate& b);

/// Greedy NMS over all candidates regardless of text. The result is in
/// nms_before order and does not depend on the input order.
std::vector<MergeCandidate> nms_merge(std::vector<MergeCandidate> candidates, double iou_threshold);

struct RotationStats {
    double angle = 0.0;
    std::size_t detections = 0;
    double seconds = 0.0;
};

/// Rotate-and-merge runner. Owns one backend per worker so subprocess
/// engines stay alive across images. run() calls are serialized.
class Pipeline {
public:
    explicit Pipeline(PipelineConfig config);
    ~Pipeline();

    Pipeline(const Pipeline&) = delete;
    Pipeline& operator=(const Pipeline&) = delete;

    const PipelineConfig& config() const noexcept { return config_; }
    const RotationSet& rotations() const noexcept { return rotations_; }

    /// All back-mapped candidates in ascending view-angle order. Any failing
    /// view aborts the call with Error(Backend) naming the angle.
    std::vector<MergeCandidate> collect_candidates(const ImageRef& img, std::vector<RotationStats>* stats = nullptr);

    std::vector<MergeCandidate> run(const ImageRef& img, std::vector<RotationStats>* stats = nullptr);

private:
    PipelineConfig config_;
    RotationSet rotations_;
    std::vector<std::unique_ptr<Backend>> workers_;
    std::mutex run_mutex_;
};

std::vector<MergeCandidate> collect_candidates(const ImageRef& img, const PipelineConfig& cfg);
std::vector<MergeCandidate> run_pipeline(const ImageRef& img, const PipelineConfig& cfg);

}  // namespace rotocr
