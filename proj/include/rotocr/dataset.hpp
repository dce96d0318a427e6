#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rotocr/geometry.hpp"
#include "rotocr/metrics.hpp"
#include "rotocr/pipeline.hpp"

namespace rotocr {

inline constexpr std::size_t kWorkersPerCrop = 5;

/// One labelled text crop. `consensus` is empty until a majority vote or a
/// manual edit of the annotation file sets it.
struct CropAnnotation {
    std::string id;
    std::string image;
    Quad quad;
    double orientation = 0.0;
    std::array<std::string, kWorkersPerCrop> workers;
    std::optional<std::string> consensus;
};

/// Exact-string vote after trimming surrounding whitespace. A label with at
/// least 3 of 5 votes wins; otherwise nullopt (left for manual resolution).
/// Throws Error(InvalidInput) unless exactly 5 labels are given.
std::optional<std::string> majority_vote(std::span<const std::string> labels);

struct ConsensusOutcome {
    std::size_t voted = 0;       // consensus filled by this call
    std::size_t kept = 0;        // consensus already present (manual)
    std::vector<std::string> unresolved_ids;
};

/// Fills every missing consensus that has a majority. Existing values are
/// kept untouched.
ConsensusOutcome apply_consensus(std::vector<CropAnnotation>& annotations);

struct CropCandidate {
    std::string id;
    Quad quad;
    double confidence = 0.0;  // best fused score over all views
};

/// Survivors of rotate-and-merge as crop candidates: after NMS each survivor
/// carries the highest fused score of its overlap group.
std::vector<CropCandidate> crop_candidates(std::span<const MergeCandidate> merged, std::string_view image_id);

/// Keeps candidates with confidence >= threshold, in input order.
std::vector<CropCandidate> select_crops(std::span<const CropCandidate> candidates, double threshold);

struct DatasetStats {
    std::size_t crop_count = 0;
    std::size_t distinct_words = 0;  // case-insensitive on consensus strings
    double horizontal_band = 15.0;
    double horizontal_fraction = 0.0;                  // |folded orientation| <= band
    std::map<std::string, std::size_t> word_frequency;  // lowercased consensus -> count
};

/// Throws Error(Unresolved) listing the ids of crops without consensus and
/// Error(Eval) for an empty annotation set.
DatasetStats compute_stats(std::span<const CropAnnotation> annotations, double horizontal_band = 15.0);

std::string format_stats_text(const DatasetStats& stats);
std::string format_stats_csv(const DatasetStats& stats);

/// Ground truths for the evaluator; crops without consensus are an error.
std::vector<GroundTruth> ground_truths(std::span<const CropAnnotation> annotations);

/// JSON-lines annotation files, one crop per line. Reading throws
/// Error(Schema) with the 1-based line number; writing is atomic.
std::string annotation_to_json(const CropAnnotation& a);
CropAnnotation annotation_from_json(std::string_view line);
std::vector<CropAnnotation> read_annotations(const std::filesystem::path& path);
void write_annotations(const std::filesystem::path& path, std::span<const CropAnnotation> annotations);

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace rotocr
