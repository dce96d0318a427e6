#include "rotocr/records.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <optional>

#include "json.hpp"
#include "rotocr/dataset.hpp"
#include "rotocr/error.hpp"
#include "rotocr/utf8.hpp"

namespace rotocr {

using nlohmann::json;

namespace {

[[noreturn]] void bad_record(const std::string& what) {
    throw Error(ErrorKind::Schema, "invalid detection record: " + what);
}

}  // namespace

std::string detection_record_json(std::string_view image, const MergeCandidate& c) {
    json poly = json::array();
    for (const Point& p : c.box.vertices()) {
        poly.push_back(p.x);
        poly.push_back(p.y);
    }
    json j{{"image", image},
           {"polygon", poly},
           {"text", c.text},
           {"det_score", c.det_score},
           {"rec_score", c.rec_score},
           {"score", c.score},
           {"source_angle", c.source_angle}};
    return j.dump();
}

DetectionRecord detection_record_from_json(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        bad_record(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) bad_record("line is not an object");
    for (const char* f : {"image", "polygon", "text", "det_score", "rec_score", "score", "source_angle"}) {
        if (!j.contains(f)) bad_record(std::string("missing field '") + f + "'");
    }
    if (!j["image"].is_string() || !j["text"].is_string()) bad_record("'image' and 'text' must be strings");
    for (const char* f : {"det_score", "rec_score", "score", "source_angle"}) {
        if (!j[f].is_number()) bad_record(std::string("'") + f + "' must be a number");
    }
    const json& poly = j["polygon"];
    if (!poly.is_array() || poly.size() != 8) bad_record("'polygon' must hold 8 numbers");
    std::array<Point, 4> pts{};
    for (std::size_t k = 0; k < 8; ++k) {
        if (!poly[k].is_number()) bad_record("'polygon' must hold 8 numbers");
        (k % 2 == 0 ? pts[k / 2].x : pts[k / 2].y) = poly[k].get<double>();
    }
    std::optional<Quad> quad;
    try {
        quad.emplace(pts);
    } catch (const Error& e) {
        bad_record(std::string("polygon: ") + e.what());
    }
    MergeCandidate c{*quad,
                     j["text"].get<std::string>(),
                     j["det_score"].get<double>(),
                     j["rec_score"].get<double>(),
                     j["score"].get<double>(),
                     j["source_angle"].get<double>()};
    double fused = 0.0;
    try {
        fused = fuse_score(c.det_score, c.rec_score);
    } catch (const Error& e) {
        bad_record(e.what());
    }
    if (std::abs(fused - c.score) > 1e-9) bad_record("'score' is not the mean of det_score and rec_score");
    return {j["image"].get<std::string>(), std::move(c)};
}

std::vector<DetectionRecord> read_detection_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open detections '" + path.string() + "'");
    std::vector<DetectionRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (utf8::trim(line).empty()) continue;
        try {
            out.push_back(detection_record_from_json(line));
        } catch (const Error& e) {
            throw Error(e.kind(), path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

EvalReport evaluate_files(const std::filesystem::path& detections, const std::filesystem::path& annotations,
                          bool case_sensitive, std::string method) {
    const std::vector<DetectionRecord> records = read_detection_records(detections);
    const std::vector<CropAnnotation> crops = read_annotations(annotations);

    std::map<std::string, std::vector<MergeCandidate>> by_image;
    for (const DetectionRecord& r : records) by_image[r.image].push_back(r.candidate);

    std::vector<std::string> image_order;
    std::map<std::string, std::vector<CropAnnotation>> crops_by_image;
    for (const CropAnnotation& a : crops) {
        auto [it, inserted] = crops_by_image.try_emplace(a.image);
        if (inserted) image_order.push_back(a.image);
        it->second.push_back(a);
    }

    std::vector<EvalSample> samples;
    for (const std::string& image : image_order) {
        const std::vector<GroundTruth> gts = ground_truths(crops_by_image[image]);
        const auto found = by_image.find(image);
        const std::vector<MergeCandidate> none;
        const auto& preds = found == by_image.end() ? none : found->second;
        auto matched = match_predictions(preds, gts);
        std::move(matched.begin(), matched.end(), std::back_inserter(samples));
    }
    return evaluate(samples, case_sensitive, std::move(method));
}

}  // namespace rotocr
