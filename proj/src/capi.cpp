#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "json.hpp"
#include "rotocr/dataset.hpp"
#include "rotocr/error.hpp"
#include "rotocr/imaging.hpp"
#include "rotocr/metrics.hpp"
#include "rotocr/pipeline.hpp"
#include "rotocr/records.hpp"
#include "rotocr/rotocr.h"
#include "rotocr/synth.hpp"
#include "rotocr/utf8.hpp"

using nlohmann::json;

struct rotocr_image {
    rotocr::ImageRef ref;
};

struct rotocr_config {
    rotocr::PipelineConfig cfg;
};

struct rotocr_pipeline {
    std::unique_ptr<rotocr::Pipeline> impl;
};

struct rotocr_result {
    std::vector<rotocr::MergeCandidate> candidates;
    std::vector<rotocr::RotationStats> views;
};

namespace {

thread_local std::string last_error;

rotocr_status status_of(rotocr::ErrorKind kind) {
    using rotocr::ErrorKind;
    switch (kind) {
        case ErrorKind::InvalidInput: return ROTOCR_E_INVALID_ARGUMENT;
        case ErrorKind::Config: return ROTOCR_E_CONFIG;
        case ErrorKind::Schema: return ROTOCR_E_SCHEMA;
        case ErrorKind::Io: return ROTOCR_E_IO;
        case ErrorKind::Backend: return ROTOCR_E_BACKEND;
        case ErrorKind::DegenerateQuad: return ROTOCR_E_DEGENERATE;
        case ErrorKind::EmptyCrop: return ROTOCR_E_EMPTY_CROP;
        case ErrorKind::Eval: return ROTOCR_E_EVAL;
        case ErrorKind::Unresolved: return ROTOCR_E_UNRESOLVED;
        case ErrorKind::Generation: return ROTOCR_E_GENERATION;
    }
    return ROTOCR_E_INTERNAL;
}

rotocr_status fail(rotocr_status status, std::string message) {
    last_error = std::move(message);
    return status;
}

template <typename F>
rotocr_status guarded(F&& body) noexcept {
    try {
        body();
        return ROTOCR_OK;
    } catch (const rotocr::Error& e) {
        return fail(status_of(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(ROTOCR_E_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(ROTOCR_E_INTERNAL, e.what());
    } catch (...) {
        return fail(ROTOCR_E_INTERNAL, "unknown exception");
    }
}

void require(bool ok, const char* what) {
    if (!ok) throw rotocr::Error(rotocr::ErrorKind::InvalidInput, what);
}

char* dup_string(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.data(), s.size() + 1);
    return p;
}

rotocr::Quad quad_from(const double poly[8]) {
    return rotocr::Quad({rotocr::Point{poly[0], poly[1]}, rotocr::Point{poly[2], poly[3]},
                         rotocr::Point{poly[4], poly[5]}, rotocr::Point{poly[6], poly[7]}});
}

rotocr::RotationTransform transform_from(const rotocr_transform& t) {
    return {t.angle, {t.pivot_x, t.pivot_y}, {t.offset_x, t.offset_y}};
}

rotocr_transform transform_to(const rotocr::RotationTransform& t) {
    return {t.angle(), t.pivot().x, t.pivot().y, t.output_offset().x, t.output_offset().y};
}

json config_json(const rotocr::PipelineConfig& c) {
    json backend{{"spec", c.backend.spec()}};
    if (c.backend.kind == rotocr::BackendConfig::Kind::Mock) {
        backend["mock_tolerance"] = c.backend.mock.tolerance;
        backend["mock_corruption"] = c.backend.mock.corruption;
    }
    return json{{"rotation_step", c.rotation_step}, {"nms_iou", c.nms_iou}, {"backend", backend}};
}

rotocr::PipelineConfig config_from_json(const std::string& text) {
    using rotocr::Error;
    using rotocr::ErrorKind;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Schema, std::string("config: malformed JSON: ") + e.what());
    }
    // A run manifest embeds the config under "config".
    if (j.is_object() && j.contains("config") && j["config"].is_object()) j = j["config"];
    if (!j.is_object() || !j.contains("rotation_step") || !j.contains("nms_iou") || !j.contains("backend") ||
        !j["rotation_step"].is_number() || !j["nms_iou"].is_number() || !j["backend"].is_object() ||
        !j["backend"].contains("spec") || !j["backend"]["spec"].is_string()) {
        throw Error(ErrorKind::Schema, "config: expected rotation_step, nms_iou and backend.spec");
    }
    rotocr::PipelineConfig c;
    c.rotation_step = j["rotation_step"].get<double>();
    c.nms_iou = j["nms_iou"].get<double>();
    c.backend = rotocr::BackendConfig::parse(j["backend"]["spec"].get<std::string>());
    const json& b = j["backend"];
    if (b.contains("mock_tolerance")) {
        if (!b["mock_tolerance"].is_number()) throw Error(ErrorKind::Schema, "config: mock_tolerance must be a number");
        c.backend.mock.tolerance = b["mock_tolerance"].get<double>();
    }
    if (b.contains("mock_corruption")) {
        if (!b["mock_corruption"].is_boolean()) {
            throw Error(ErrorKind::Schema, "config: mock_corruption must be a boolean");
        }
        c.backend.mock.corruption = b["mock_corruption"].get<bool>();
    }
    return c;
}

}  // namespace

extern "C" {

const char* rotocr_version(void) { return "0.3.0"; }

const char* rotocr_last_error(void) { return last_error.c_str(); }

const char* rotocr_status_name(rotocr_status status) {
    switch (status) {
        case ROTOCR_OK: return "ok";
        case ROTOCR_E_INVALID_ARGUMENT: return "invalid argument";
        case ROTOCR_E_CONFIG: return "config error";
        case ROTOCR_E_SCHEMA: return "schema error";
        case ROTOCR_E_IO: return "i/o error";
        case ROTOCR_E_BACKEND: return "backend failure";
        case ROTOCR_E_DEGENERATE: return "degenerate quad";
        case ROTOCR_E_EMPTY_CROP: return "empty crop";
        case ROTOCR_E_EVAL: return "evaluation error";
        case ROTOCR_E_UNRESOLVED: return "unresolved consensus";
        case ROTOCR_E_GENERATION: return "generation error";
        case ROTOCR_E_INTERNAL: return "internal error";
    }
    return "unknown status";
}

void rotocr_free(void* ptr) { std::free(ptr); }

/* geometry */

rotocr_status rotocr_transform_apply(const rotocr_transform* t, double x, double y, double* out_x, double* out_y) {
    return guarded([&] {
        require(t && out_x && out_y, "null argument");
        const rotocr::Point p = rotocr::apply_transform(transform_from(*t), {x, y});
        *out_x = p.x;
        *out_y = p.y;
    });
}

rotocr_status rotocr_transform_invert(const rotocr_transform* t, rotocr_transform* out) {
    return guarded([&] {
        require(t && out, "null argument");
        *out = transform_to(rotocr::invert_transform(transform_from(*t)));
    });
}

rotocr_status rotocr_polygon_iou(const double a[8], const double b[8], double* out) {
    return guarded([&] {
        require(a && b && out, "null argument");
        *out = rotocr::iou(quad_from(a), quad_from(b));
    });
}

rotocr_status rotocr_polygon_intersection_area(const double a[8], const double b[8], double* out) {
    return guarded([&] {
        require(a && b && out, "null argument");
        *out = rotocr::polygon_intersection_area(quad_from(a), quad_from(b));
    });
}

/* images */

rotocr_status rotocr_image_load_png(const char* path, rotocr_image** out) {
    return guarded([&] {
        require(path && out, "null argument");
        *out = new rotocr_image{rotocr::load_image(path)};
    });
}

rotocr_status rotocr_image_load_scene(const char* path, rotocr_image** out) {
    return guarded([&] {
        require(path && out, "null argument");
        *out = new rotocr_image{rotocr::load_scene_image(path)};
    });
}

rotocr_status rotocr_image_from_rgb(int width, int height, const uint8_t* rgb, const char* id, rotocr_image** out) {
    return guarded([&] {
        require(rgb && out, "null argument");
        rotocr::Raster r(width, height);
        std::memcpy(r.rgb.data(), rgb, r.rgb.size());
        *out = new rotocr_image{rotocr::ImageRef::from_raster(std::move(r), id ? id : "")};
    });
}

void rotocr_image_destroy(rotocr_image* img) { delete img; }

const char* rotocr_image_id(const rotocr_image* img) { return img ? img->ref.id().c_str() : ""; }

int rotocr_image_is_virtual(const rotocr_image* img) { return img && img->ref.is_virtual() ? 1 : 0; }

rotocr_status rotocr_image_size(const rotocr_image* img, int* width, int* height) {
    return guarded([&] {
        require(img && width && height, "null argument");
        *width = img->ref.width();
        *height = img->ref.height();
    });
}

rotocr_status rotocr_image_pixels(const rotocr_image* img, const uint8_t** rgb) {
    return guarded([&] {
        require(img && rgb, "null argument");
        *rgb = img->ref.raster().rgb.data();
    });
}

rotocr_status rotocr_image_save_png(const rotocr_image* img, const char* path) {
    return guarded([&] {
        require(img && path, "null argument");
        rotocr::save_image(img->ref, path);
    });
}

rotocr_status rotocr_image_rotate(const rotocr_image* img, double degrees, rotocr_image** out,
                                  rotocr_transform* transform) {
    return guarded([&] {
        require(img && out, "null argument");
        rotocr::RotatedImage r = rotocr::rotate_image(img->ref, degrees);
        if (transform) *transform = transform_to(r.transform);
        *out = new rotocr_image{std::move(r.image)};
    });
}

rotocr_status rotocr_image_crop(const rotocr_image* img, const double polygon[8], int out_w, int out_h,
                                rotocr_image** out) {
    return guarded([&] {
        require(img && polygon && out, "null argument");
        *out = new rotocr_image{rotocr::crop_and_resize(img->ref, quad_from(polygon), out_w, out_h)};
    });
}

/* configuration */

rotocr_status rotocr_config_create(rotocr_config** out) {
    return guarded([&] {
        require(out, "null argument");
        *out = new rotocr_config{};
    });
}

void rotocr_config_destroy(rotocr_config* cfg) { delete cfg; }

rotocr_status rotocr_config_set_rotation_step(rotocr_config* cfg, double degrees) {
    return guarded([&] {
        require(cfg, "null argument");
        rotocr::build_rotation_set(degrees);
        cfg->cfg.rotation_step = degrees;
    });
}

rotocr_status rotocr_config_set_nms_iou(rotocr_config* cfg, double threshold) {
    return guarded([&] {
        require(cfg, "null argument");
        if (!(threshold > 0.0 && threshold < 1.0)) {
            throw rotocr::Error(rotocr::ErrorKind::Config, "NMS IoU threshold must lie in (0, 1)");
        }
        cfg->cfg.nms_iou = threshold;
    });
}

rotocr_status rotocr_config_set_backend(rotocr_config* cfg, const char* spec) {
    return guarded([&] {
        require(cfg && spec, "null argument");
        rotocr::BackendConfig parsed = rotocr::BackendConfig::parse(spec);
        parsed.mock = cfg->cfg.backend.mock;
        parsed.subprocess.timeout_seconds = cfg->cfg.backend.subprocess.timeout_seconds;
        cfg->cfg.backend = std::move(parsed);
    });
}

rotocr_status rotocr_config_set_mock_tolerance(rotocr_config* cfg, double degrees) {
    return guarded([&] {
        require(cfg, "null argument");
        if (!(degrees > 0.0 && degrees <= 90.0)) {
            throw rotocr::Error(rotocr::ErrorKind::Config, "mock tolerance must lie in (0, 90] degrees");
        }
        cfg->cfg.backend.mock.tolerance = degrees;
    });
}

rotocr_status rotocr_config_set_mock_corruption(rotocr_config* cfg, int enabled) {
    return guarded([&] {
        require(cfg, "null argument");
        cfg->cfg.backend.mock.corruption = enabled != 0;
    });
}

rotocr_status rotocr_config_set_backend_timeout(rotocr_config* cfg, double seconds) {
    return guarded([&] {
        require(cfg, "null argument");
        if (!(seconds > 0.0)) throw rotocr::Error(rotocr::ErrorKind::Config, "backend timeout must be positive");
        cfg->cfg.backend.subprocess.timeout_seconds = seconds;
    });
}

rotocr_status rotocr_config_set_jobs(rotocr_config* cfg, int jobs) {
    return guarded([&] {
        require(cfg, "null argument");
        if (jobs < 1) throw rotocr::Error(rotocr::ErrorKind::Config, "jobs must be >= 1");
        cfg->cfg.jobs = jobs;
    });
}

rotocr_status rotocr_config_validate(const rotocr_config* cfg) {
    return guarded([&] {
        require(cfg, "null argument");
        cfg->cfg.validate();
    });
}

rotocr_status rotocr_config_to_json(const rotocr_config* cfg, char** out) {
    return guarded([&] {
        require(cfg && out, "null argument");
        *out = dup_string(config_json(cfg->cfg).dump());
    });
}

rotocr_status rotocr_config_from_json(const char* text, rotocr_config** out) {
    return guarded([&] {
        require(text && out, "null argument");
        rotocr::PipelineConfig c = config_from_json(text);
        c.validate();
        *out = new rotocr_config{std::move(c)};
    });
}

/* pipeline */

rotocr_status rotocr_fuse_score(double det_score, double rec_score, double* out) {
    return guarded([&] {
        require(out, "null argument");
        *out = rotocr::fuse_score(det_score, rec_score);
    });
}

rotocr_status rotocr_pipeline_create(const rotocr_config* cfg, rotocr_pipeline** out) {
    return guarded([&] {
        require(cfg && out, "null argument");
        *out = new rotocr_pipeline{std::make_unique<rotocr::Pipeline>(cfg->cfg)};
    });
}

void rotocr_pipeline_destroy(rotocr_pipeline* p) { delete p; }

size_t rotocr_pipeline_view_count(const rotocr_pipeline* p) { return p ? p->impl->rotations().angles.size() : 0; }

rotocr_status rotocr_pipeline_run(rotocr_pipeline* p, const rotocr_image* img, rotocr_result** out) {
    return guarded([&] {
        require(p && img && out, "null argument");
        auto r = std::make_unique<rotocr_result>();
        r->candidates = p->impl->run(img->ref, &r->views);
        *out = r.release();
    });
}

rotocr_status rotocr_pipeline_collect(rotocr_pipeline* p, const rotocr_image* img, rotocr_result** out) {
    return guarded([&] {
        require(p && img && out, "null argument");
        auto r = std::make_unique<rotocr_result>();
        r->candidates = p->impl->collect_candidates(img->ref, &r->views);
        *out = r.release();
    });
}

size_t rotocr_result_count(const rotocr_result* r) { return r ? r->candidates.size() : 0; }

rotocr_status rotocr_result_get(const rotocr_result* r, size_t index, rotocr_detection* out) {
    return guarded([&] {
        require(r && out, "null argument");
        require(index < r->candidates.size(), "detection index out of range");
        const rotocr::MergeCandidate& c = r->candidates[index];
        for (std::size_t k = 0; k < 4; ++k) {
            out->polygon[2 * k] = c.box[k].x;
            out->polygon[2 * k + 1] = c.box[k].y;
        }
        out->text = c.text.c_str();
        out->det_score = c.det_score;
        out->rec_score = c.rec_score;
        out->score = c.score;
        out->source_angle = c.source_angle;
    });
}

size_t rotocr_result_view_count(const rotocr_result* r) { return r ? r->views.size() : 0; }

rotocr_status rotocr_result_view(const rotocr_result* r, size_t index, rotocr_view_stats* out) {
    return guarded([&] {
        require(r && out, "null argument");
        require(index < r->views.size(), "view index out of range");
        const rotocr::RotationStats& s = r->views[index];
        *out = {s.angle, s.detections, s.seconds};
    });
}

rotocr_status rotocr_result_to_jsonl(const rotocr_result* r, const char* image_id, char** out) {
    return guarded([&] {
        require(r && image_id && out, "null argument");
        std::string text;
        for (const rotocr::MergeCandidate& c : r->candidates) text += rotocr::detection_record_json(image_id, c) + "\n";
        *out = dup_string(text);
    });
}

void rotocr_result_destroy(rotocr_result* r) { delete r; }

/* evaluation */

size_t rotocr_edit_distance(const char* a, const char* b) {
    return rotocr::edit_distance(a ? a : "", b ? b : "");
}

rotocr_status rotocr_evaluate_files(const char* detections_path, const char* annotations_path, int case_sensitive,
                                    rotocr_eval_report* out) {
    return guarded([&] {
        require(detections_path && annotations_path && out, "null argument");
        const rotocr::EvalReport r =
            rotocr::evaluate_files(detections_path, annotations_path, case_sensitive != 0, {});
        *out = {r.accuracy, r.avg_ed, r.norm_ed, r.samples};
    });
}

rotocr_status rotocr_format_reports(const char* const* labels, const rotocr_eval_report* reports, size_t n, int csv,
                                    char** out) {
    return guarded([&] {
        require(out && (n == 0 || (labels && reports)), "null argument");
        std::vector<rotocr::EvalReport> rows;
        for (size_t i = 0; i < n; ++i) {
            rows.push_back({labels[i] ? labels[i] : "", reports[i].accuracy, reports[i].avg_ed, reports[i].norm_ed,
                            reports[i].samples});
        }
        *out = dup_string(csv ? rotocr::format_report_csv(rows) : rotocr::format_report_table(rows));
    });
}

/* dataset */

rotocr_status rotocr_majority_vote(const char* const* labels, size_t n, char** out) {
    return guarded([&] {
        require(out && (n == 0 || labels), "null argument");
        *out = nullptr;
        std::vector<std::string> v;
        for (size_t i = 0; i < n; ++i) {
            require(labels[i], "null label");
            v.emplace_back(labels[i]);
        }
        const auto winner = rotocr::majority_vote(v);
        if (!winner) throw rotocr::Error(rotocr::ErrorKind::Unresolved, "no label has a majority");
        *out = dup_string(*winner);
    });
}

rotocr_status rotocr_consensus_file(const char* in_path, const char* out_path, size_t* voted, char** unresolved_ids) {
    return guarded([&] {
        require(in_path && out_path, "null argument");
        if (unresolved_ids) *unresolved_ids = nullptr;
        std::vector<rotocr::CropAnnotation> ann = rotocr::read_annotations(in_path);
        const rotocr::ConsensusOutcome outcome = rotocr::apply_consensus(ann);
        rotocr::write_annotations(out_path, ann);
        if (voted) *voted = outcome.voted;
        std::string ids;
        for (const std::string& id : outcome.unresolved_ids) ids += id + "\n";
        if (unresolved_ids) *unresolved_ids = dup_string(ids);
        if (!outcome.unresolved_ids.empty()) {
            throw rotocr::Error(rotocr::ErrorKind::Unresolved,
                                std::to_string(outcome.unresolved_ids.size()) + " crop(s) need manual resolution");
        }
    });
}

rotocr_status rotocr_stats_file(const char* annotations_path, double band_degrees, char** text, char** csv) {
    return guarded([&] {
        require(annotations_path, "null argument");
        const auto ann = rotocr::read_annotations(annotations_path);
        const rotocr::DatasetStats stats = rotocr::compute_stats(ann, band_degrees);
        if (text) *text = dup_string(rotocr::format_stats_text(stats));
        if (csv) *csv = dup_string(rotocr::format_stats_csv(stats));
    });
}

rotocr_status rotocr_select_crops_file(const char* detections_path, double threshold, const char* out_path,
                                       size_t* kept) {
    return guarded([&] {
        require(detections_path && out_path, "null argument");
        const auto records = rotocr::read_detection_records(detections_path);
        std::vector<rotocr::CropCandidate> cands;
        cands.reserve(records.size());
        for (std::size_t i = 0; i < records.size(); ++i) {
            cands.push_back({std::to_string(i), records[i].candidate.box, records[i].candidate.score});
        }
        std::string text;
        const auto selected = rotocr::select_crops(cands, threshold);
        for (const rotocr::CropCandidate& c : selected) {
            const auto& rec = records[std::stoul(c.id)];
            text += rotocr::detection_record_json(rec.image, rec.candidate) + "\n";
        }
        rotocr::write_file_atomic(out_path, text);
        if (kept) *kept = selected.size();
    });
}

/* synthetic scenes */

void rotocr_synth_params_default(rotocr_synth_params* out) {
    if (!out) return;
    const rotocr::SynthConfig d;
    *out = {d.seed, d.scenes, d.instances_per_scene, d.p_horizontal, d.band, d.canvas_w, d.canvas_h, nullptr};
}

rotocr_status rotocr_generate_corpus(const rotocr_synth_params* params, const char* out_dir) {
    return guarded([&] {
        require(params && out_dir, "null argument");
        rotocr::SynthConfig cfg;
        cfg.seed = params->seed;
        cfg.scenes = params->scenes;
        cfg.instances_per_scene = params->instances_per_scene;
        cfg.p_horizontal = params->p_horizontal;
        cfg.band = params->band_degrees;
        cfg.canvas_w = params->canvas_w;
        cfg.canvas_h = params->canvas_h;
        if (params->words_path) {
            std::ifstream in(params->words_path);
            if (!in) throw rotocr::Error(rotocr::ErrorKind::Io, std::string("cannot open word list '") +
                                                                    params->words_path + "'");
            cfg.words.clear();
            for (std::string line; std::getline(in, line);) {
                std::string w = rotocr::utf8::trim(line);
                if (!w.empty()) cfg.words.push_back(std::move(w));
            }
        }
        rotocr::write_corpus(rotocr::generate(cfg), out_dir);
    });
}

}  // extern "C"
