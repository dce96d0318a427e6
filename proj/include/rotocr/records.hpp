#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rotocr/metrics.hpp"
#include "rotocr/pipeline.hpp"

namespace rotocr {

/// One line of a detections file: a final detection tagged with its image.
struct DetectionRecord {
    std::string image;
    MergeCandidate candidate;
};

/// {"image","polygon":[8],"text","det_score","rec_score","score","source_angle"}
std::string detection_record_json(std::string_view image, const MergeCandidate& c);
DetectionRecord detection_record_from_json(std::string_view line);

/// Throws Error(Io) when unreadable and Error(Schema) with the line number on
/// malformed content.
std::vector<DetectionRecord> read_detection_records(const std::filesystem::path& path);

/// Joins a detections file to an annotation file per image and evaluates.
/// Images absent from the detections file count as fully unread.
EvalReport evaluate_files(const std::filesystem::path& detections, const std::filesystem::path& annotations,
                          bool case_sensitive, std::string method);

}  // namespace rotocr
