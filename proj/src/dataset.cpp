#include "rotocr/dataset.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rotocr/error.hpp"
#include "rotocr/utf8.hpp"

namespace rotocr {

using nlohmann::json;

namespace {

[[noreturn]] void bad_annotation(const std::string& what) {
    throw Error(ErrorKind::Schema, "invalid annotation: " + what);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::optional<std::string> majority_vote(std::span<const std::string> labels) {
    if (labels.size() != kWorkersPerCrop) {
        throw Error(ErrorKind::InvalidInput,
                    "majority vote needs exactly 5 labels, got " + std::to_string(labels.size()));
    }
    std::map<std::string, std::size_t> votes;
    for (const std::string& l : labels) ++votes[utf8::trim(l)];
    for (const auto& [label, count] : votes) {
        if (count >= 3) return label;
    }
    return std::nullopt;
}

ConsensusOutcome apply_consensus(std::vector<CropAnnotation>& annotations) {
    ConsensusOutcome outcome;
    for (CropAnnotation& a : annotations) {
        if (a.consensus) {
            ++outcome.kept;
            continue;
        }
        if (auto winner = majority_vote(a.workers)) {
            a.consensus = std::move(winner);
            ++outcome.voted;
        } else {
            outcome.unresolved_ids.push_back(a.id);
        }
    }
    return outcome;
}

std::vector<CropCandidate> crop_candidates(std::span<const MergeCandidate> merged, std::string_view image_id) {
    std::vector<CropCandidate> out;
    out.reserve(merged.size());
    for (std::size_t i = 0; i < merged.size(); ++i) {
        out.push_back({std::string(image_id) + "/" + std::to_string(i), merged[i].box, merged[i].score});
    }
    return out;
}

std::vector<CropCandidate> select_crops(std::span<const CropCandidate> candidates, double threshold) {
    std::vector<CropCandidate> out;
    for (const CropCandidate& c : candidates) {
        if (c.confidence >= threshold) out.push_back(c);
    }
    return out;
}

DatasetStats compute_stats(std::span<const CropAnnotation> annotations, double horizontal_band) {
    if (annotations.empty()) throw Error(ErrorKind::Eval, "no annotations to summarize");
    std::vector<std::string> unresolved;
    for (const CropAnnotation& a : annotations) {
        if (!a.consensus) unresolved.push_back(a.id);
    }
    if (!unresolved.empty()) {
        std::string ids;
        for (const std::string& id : unresolved) ids += (ids.empty() ? "" : ", ") + id;
        throw Error(ErrorKind::Unresolved, "crops without consensus: " + ids);
    }

    DatasetStats stats;
    stats.crop_count = annotations.size();
    stats.horizontal_band = horizontal_band;
    std::size_t horizontal = 0;
    for (const CropAnnotation& a : annotations) {
        ++stats.word_frequency[utf8::to_lower(*a.consensus)];
        if (std::abs(fold_degrees(a.orientation)) <= horizontal_band) ++horizontal;
    }
    stats.distinct_words = stats.word_frequency.size();
    stats.horizontal_fraction = static_cast<double>(horizontal) / static_cast<double>(annotations.size());
    return stats;
}

std::string format_stats_text(const DatasetStats& stats) {
    std::ostringstream os;
    char buf[128];
    os << "crops:            " << stats.crop_count << "\n";
    os << "distinct words:   " << stats.distinct_words << "\n";
    std::snprintf(buf, sizeof buf, "within +-%g deg:  %.4f\n", stats.horizontal_band, stats.horizontal_fraction);
    os << buf;
    os << "word frequency:\n";
    std::vector<std::pair<std::string, std::size_t>> words(stats.word_frequency.begin(), stats.word_frequency.end());
    std::stable_sort(words.begin(), words.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    for (const auto& [word, count] : words) os << "  " << count << "\t" << word << "\n";
    return os.str();
}

std::string format_stats_csv(const DatasetStats& stats) {
    std::ostringstream os;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", stats.horizontal_fraction);
    os << "metric,value\n";
    os << "crops," << stats.crop_count << "\n";
    os << "distinct_words," << stats.distinct_words << "\n";
    os << "horizontal_band_deg," << stats.horizontal_band << "\n";
    os << "horizontal_fraction," << buf << "\n";
    for (const auto& [word, count] : stats.word_frequency) os << "word:" << csv_field(word) << "," << count << "\n";
    return os.str();
}

std::vector<GroundTruth> ground_truths(std::span<const CropAnnotation> annotations) {
    std::vector<GroundTruth> out;
    out.reserve(annotations.size());
    for (const CropAnnotation& a : annotations) {
        if (!a.consensus) throw Error(ErrorKind::Unresolved, "crop '" + a.id + "' has no consensus");
        out.push_back({a.id, a.quad, *a.consensus});
    }
    return out;
}

std::string annotation_to_json(const CropAnnotation& a) {
    json poly = json::array();
    for (const Point& p : a.quad.vertices()) {
        poly.push_back(p.x);
        poly.push_back(p.y);
    }
    json j{{"id", a.id},
           {"image", a.image},
           {"polygon", poly},
           {"orientation", a.orientation},
           {"workers", a.workers},
           {"consensus", a.consensus ? json(*a.consensus) : json(nullptr)}};
    return j.dump();
}

CropAnnotation annotation_from_json(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        bad_annotation(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) bad_annotation("line is not an object");
    for (const char* f : {"id", "image", "polygon", "orientation", "workers", "consensus"}) {
        if (!j.contains(f)) bad_annotation(std::string("missing field '") + f + "'");
    }
    if (!j["id"].is_string() || !j["image"].is_string()) bad_annotation("'id' and 'image' must be strings");
    const json& poly = j["polygon"];
    if (!poly.is_array() || poly.size() != 8) bad_annotation("'polygon' must hold 8 numbers");
    std::array<Point, 4> pts{};
    for (std::size_t k = 0; k < 8; ++k) {
        if (!poly[k].is_number()) bad_annotation("'polygon' must hold 8 numbers");
        (k % 2 == 0 ? pts[k / 2].x : pts[k / 2].y) = poly[k].get<double>();
    }
    if (!j["orientation"].is_number()) bad_annotation("'orientation' must be a number");
    const json& workers = j["workers"];
    if (!workers.is_array() || workers.size() != kWorkersPerCrop) bad_annotation("'workers' must hold 5 strings");
    const json& consensus = j["consensus"];
    if (!consensus.is_null() && !consensus.is_string()) bad_annotation("'consensus' must be a string or null");

    std::optional<Quad> quad;
    try {
        quad.emplace(pts);
    } catch (const Error& e) {
        bad_annotation(std::string("polygon: ") + e.what());
    }
    CropAnnotation a{j["id"].get<std::string>(), j["image"].get<std::string>(), *quad,
                     j["orientation"].get<double>(), {}, std::nullopt};
    if (!std::isfinite(a.orientation)) bad_annotation("'orientation' must be finite");
    for (std::size_t k = 0; k < kWorkersPerCrop; ++k) {
        if (!workers[k].is_string()) bad_annotation("'workers' must hold 5 strings");
        a.workers[k] = workers[k].get<std::string>();
    }
    if (consensus.is_string()) a.consensus = consensus.get<std::string>();
    return a;
}

std::vector<CropAnnotation> read_annotations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open annotations '" + path.string() + "'");
    std::vector<CropAnnotation> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (utf8::trim(line).empty()) continue;
        try {
            out.push_back(annotation_from_json(line));
        } catch (const Error& e) {
            throw Error(e.kind(), path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void write_annotations(const std::filesystem::path& path, std::span<const CropAnnotation> annotations) {
    std::string content;
    for (const CropAnnotation& a : annotations) content += annotation_to_json(a) + "\n";
    write_file_atomic(path, content);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp-" + std::to_string(getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::Io, "cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw Error(ErrorKind::Io, "cannot write '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorKind::Io, "cannot replace '" + path.string() + "'");
    }
}

}  // namespace rotocr
