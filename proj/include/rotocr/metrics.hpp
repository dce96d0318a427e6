#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rotocr/geometry.hpp"
#include "rotocr/pipeline.hpp"

namespace rotocr {

/// Levenshtein distance with unit costs, counted in Unicode code points.
std::size_t edit_distance(std::string_view a, std::string_view b);
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);

struct EvalSample {
    std::string id;
    std::string ground_truth;  // non-empty
    std::string prediction;    // empty when nothing was read
};

struct EvalReport {
    std::string method;
    double accuracy = 0.0;  // exact matches / samples
    double avg_ed = 0.0;    // mean edit distance
    double norm_ed = 0.0;   // mean of edit distance / ground-truth length
    std::size_t samples = 0;
};

/// Word accuracy, average and normalized edit distance. Both strings are
/// lowercased unless `case_sensitive`; whitespace is significant. Throws
/// Error(Eval) on an empty sample list or an empty ground truth.
EvalReport evaluate(std::span<const EvalSample> samples, bool case_sensitive = false, std::string method = {});

struct GroundTruth {
    std::string id;
    Quad box;
    std::string text;
};

/// Pairs ground truths with predictions greedily by descending IoU, only for
/// IoU >= 0.5 and each prediction at most once. Unmatched ground truths get
/// an empty prediction. Output follows the ground-truth order.
std::vector<EvalSample> match_predictions(std::span<const MergeCandidate> predictions,
                                          std::span<const GroundTruth> ground_truths);

inline constexpr double kMatchIou = 0.5;

/// Aligned plain-text table: Method | Accuracy | Avg. ED | Norm. ED | N.
std::string format_report_table(std::span<const EvalReport> rows);

/// CSV with header `method,accuracy,avg_ed,norm_ed,n`.
std::string format_report_csv(std::span<const EvalReport> rows);

}  // namespace rotocr
