#include "rotocr/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "rotocr/error.hpp"

namespace rotocr {

namespace {

std::string angle_label(double angle) {
    std::ostringstream os;
    os << angle;
    return os.str();
}

struct ViewResult {
    std::vector<MergeCandidate> candidates;
    RotationStats stats;
    std::exception_ptr error;
};

ViewResult run_view(Backend& backend, const ImageRef& img, double angle) {
    ViewResult result;
    result.stats.angle = angle;
    const auto start = std::chrono::steady_clock::now();
    try {
        const RotatedImage view = rotate_image(img, angle);
        const std::vector<Detection> dets = backend.detect(view.image, img.id() + "@" + angle_label(angle));
        const RotationTransform back = invert_transform(view.transform);
        result.candidates.reserve(dets.size());
        for (const Detection& d : dets) {
            result.candidates.push_back(MergeCandidate{transform_quad(back, d.box), d.text, d.det_score, d.rec_score,
                                                       fuse_score(d.det_score, d.rec_score), angle});
        }
        result.stats.detections = dets.size();
    } catch (const Error& e) {
        result.error = std::make_exception_ptr(
            Error(e.kind(), "rotation " + angle_label(angle) + " deg of '" + img.id() + "': " + e.what()));
    } catch (...) {
        result.error = std::current_exception();
    }
    result.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

bool box_before(const Quad& a, const Quad& b) {
    for (std::size_t i = 0; i < 4; ++i) {
        if (a[i].x != b[i].x) return a[i].x < b[i].x;
        if (a[i].y != b[i].y) return a[i].y < b[i].y;
    }
    return false;
}

}  // namespace

RotationSet build_rotation_set(double step) {
    if (!std::isfinite(step) || step <= 0.0 || step > 360.0) {
        throw Error(ErrorKind::Config, "rotation step must lie in (0, 360] degrees");
    }
    const double count = std::round(360.0 / step);
    if (std::abs(count * step - 360.0) > 1e-9) {
        throw Error(ErrorKind::Config, "rotation step " + angle_label(step) + " does not divide 360");
    }
    RotationSet set{step, {}};
    const auto n = static_cast<std::size_t>(count);
    set.angles.reserve(n);
    for (std::size_t i = 0; i < n; ++i) set.angles.push_back(static_cast<double>(i) * step);
    return set;
}

double fuse_score(double det_score, double rec_score) {
    const auto ok = [](double s) { return std::isfinite(s) && s >= 0.0 && s <= 1.0; };
    if (!ok(det_score) || !ok(rec_score)) throw Error(ErrorKind::InvalidInput, "scores must lie in [0, 1]");
    return (det_score + rec_score) / 2.0;
}

void PipelineConfig::validate() const {
    build_rotation_set(rotation_step);
    if (!(nms_iou > 0.0 && nms_iou < 1.0)) throw Error(ErrorKind::Config, "NMS IoU threshold must lie in (0, 1)");
    if (jobs < 1) throw Error(ErrorKind::Config, "jobs must be >= 1");
    backend.validate();
}

bool nms_before(const MergeCandidate& a, const MergeCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.source_angle != b.source_angle) return a.source_angle < b.source_angle;
    if (a.text != b.text) return a.text < b.text;
    if (a.box != b.box) return box_before(a.box, b.box);
    if (a.det_score != b.det_score) return a.det_score > b.det_score;
    return false;
}

std::vector<MergeCandidate> nms_merge(std::vector<MergeCandidate> candidates, double iou_threshold) {
    std::sort(candidates.begin(), candidates.end(), nms_before);
    std::vector<MergeCandidate> kept;
    std::vector<bool> suppressed(candidates.size(), false);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (suppressed[i]) continue;
        kept.push_back(candidates[i]);
        for (std::size_t j = i + 1; j < candidates.size(); ++j) {
            if (!suppressed[j] && iou(candidates[i].box, candidates[j].box) > iou_threshold) suppressed[j] = true;
        }
    }
    return kept;
}

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {
    config_.validate();
    rotations_ = build_rotation_set(config_.rotation_step);
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(config_.jobs), rotations_.angles.size());
    workers_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) workers_.push_back(make_backend(config_.backend));
}

Pipeline::~Pipeline() = default;

std::vector<MergeCandidate> Pipeline::collect_candidates(const ImageRef& img, std::vector<RotationStats>* stats) {
    std::lock_guard lock(run_mutex_);
    const std::vector<double>& angles = rotations_.angles;
    std::vector<ViewResult> results(angles.size());

    if (workers_.size() <= 1) {
        for (std::size_t i = 0; i < angles.size(); ++i) {
            results[i] = run_view(*workers_.front(), img, angles[i]);
            if (results[i].error) break;
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        std::vector<std::jthread> threads;
        threads.reserve(workers_.size());
        for (auto& worker : workers_) {
            threads.emplace_back([&, backend = worker.get()] {
                for (std::size_t i = next.fetch_add(1); i < angles.size() && !failed; i = next.fetch_add(1)) {
                    results[i] = run_view(*backend, img, angles[i]);
                    if (results[i].error) failed = true;
                }
            });
        }
    }

    std::vector<MergeCandidate> all;
    for (ViewResult& r : results) {
        if (r.error) std::rethrow_exception(r.error);
    }
    if (stats) stats->clear();
    for (ViewResult& r : results) {
        if (stats) stats->push_back(r.stats);
        std::move(r.candidates.begin(), r.candidates.end(), std::back_inserter(all));
    }
    return all;
}

std::vector<MergeCandidate> Pipeline::run(const ImageRef& img, std::vector<RotationStats>* stats) {
    return nms_merge(collect_candidates(img, stats), config_.nms_iou);
}

std::vector<MergeCandidate> collect_candidates(const ImageRef& img, const PipelineConfig& cfg) {
    return Pipeline(cfg).collect_candidates(img);
}

std::vector<MergeCandidate> run_pipeline(const ImageRef& img, const PipelineConfig& cfg) {
    return Pipeline(cfg).run(img);
}

}  // namespace rotocr
