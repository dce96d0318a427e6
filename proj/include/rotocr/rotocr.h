/*
 * rotocr C API.
 *
 * Every fallible call returns a rotocr_status; on failure the message is
 * available from rotocr_last_error() on the calling thread until the next
 * failing call on that thread. Objects are opaque handles created by
 * *_create / *_load functions and released with the matching *_destroy.
 * Strings returned through char** are heap-allocated and must be released
 * with rotocr_free().
 */
#ifndef ROTOCR_ROTOCR_H
#define ROTOCR_ROTOCR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ROTOCR_BUILDING_LIBRARY)
#    define ROTOCR_API __declspec(dllexport)
#  else
#    define ROTOCR_API __declspec(dllimport)
#  endif
#else
#  define ROTOCR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rotocr_status {
    ROTOCR_OK = 0,
    ROTOCR_E_INVALID_ARGUMENT = 1,
    ROTOCR_E_CONFIG = 2,
    ROTOCR_E_SCHEMA = 3,
    ROTOCR_E_IO = 4,
    ROTOCR_E_BACKEND = 5,
    ROTOCR_E_DEGENERATE = 6,
    ROTOCR_E_EMPTY_CROP = 7,
    ROTOCR_E_EVAL = 8,
    ROTOCR_E_UNRESOLVED = 9,
    ROTOCR_E_GENERATION = 10,
    ROTOCR_E_INTERNAL = 99
} rotocr_status;

ROTOCR_API const char* rotocr_version(void);
ROTOCR_API const char* rotocr_last_error(void);
ROTOCR_API const char* rotocr_status_name(rotocr_status status);
ROTOCR_API void rotocr_free(void* ptr);

/* ---- geometry ---------------------------------------------------------- */

/* p' = pivot + R(angle) * (p - pivot) + offset, angle in degrees CCW. */
typedef struct rotocr_transform {
    double angle;
    double pivot_x, pivot_y;
    double offset_x, offset_y;
} rotocr_transform;

ROTOCR_API rotocr_status rotocr_transform_apply(const rotocr_transform* t, double x, double y,
                                                double* out_x, double* out_y);
ROTOCR_API rotocr_status rotocr_transform_invert(const rotocr_transform* t, rotocr_transform* out);

/* Polygons are 4 points as x1,y1,...,x4,y4; convex, either winding. */
ROTOCR_API rotocr_status rotocr_polygon_iou(const double a[8], const double b[8], double* out);
ROTOCR_API rotocr_status rotocr_polygon_intersection_area(const double a[8], const double b[8], double* out);

/* ---- images ------------------------------------------------------------ */

typedef struct rotocr_image rotocr_image;

ROTOCR_API rotocr_status rotocr_image_load_png(const char* path, rotocr_image** out);
ROTOCR_API rotocr_status rotocr_image_load_scene(const char* path, rotocr_image** out);
/* Copies width*height*3 bytes of interleaved RGB. */
ROTOCR_API rotocr_status rotocr_image_from_rgb(int width, int height, const uint8_t* rgb, const char* id,
                                               rotocr_image** out);
ROTOCR_API void rotocr_image_destroy(rotocr_image* img);

ROTOCR_API const char* rotocr_image_id(const rotocr_image* img);
ROTOCR_API int rotocr_image_is_virtual(const rotocr_image* img);
ROTOCR_API rotocr_status rotocr_image_size(const rotocr_image* img, int* width, int* height);
/* Borrowed pointer, valid while img lives. Raster images only. */
ROTOCR_API rotocr_status rotocr_image_pixels(const rotocr_image* img, const uint8_t** rgb);
ROTOCR_API rotocr_status rotocr_image_save_png(const rotocr_image* img, const char* path);
ROTOCR_API rotocr_status rotocr_image_rotate(const rotocr_image* img, double degrees, rotocr_image** out,
                                             rotocr_transform* transform);
ROTOCR_API rotocr_status rotocr_image_crop(const rotocr_image* img, const double polygon[8], int out_w, int out_h,
                                           rotocr_image** out);

/* ---- configuration ----------------------------------------------------- */

typedef struct rotocr_config rotocr_config;

/* Defaults: step 15, NMS IoU 0.5, mock backend (tolerance 10, no
 * corruption), backend timeout 60 s, 1 job. */
ROTOCR_API rotocr_status rotocr_config_create(rotocr_config** out);
ROTOCR_API void rotocr_config_destroy(rotocr_config* cfg);
ROTOCR_API rotocr_status rotocr_config_set_rotation_step(rotocr_config* cfg, double degrees);
ROTOCR_API rotocr_status rotocr_config_set_nms_iou(rotocr_config* cfg, double threshold);
/* "mock" or "cmd:<shell command>" */
ROTOCR_API rotocr_status rotocr_config_set_backend(rotocr_config* cfg, const char* spec);
ROTOCR_API rotocr_status rotocr_config_set_mock_tolerance(rotocr_config* cfg, double degrees);
ROTOCR_API rotocr_status rotocr_config_set_mock_corruption(rotocr_config* cfg, int enabled);
ROTOCR_API rotocr_status rotocr_config_set_backend_timeout(rotocr_config* cfg, double seconds);
ROTOCR_API rotocr_status rotocr_config_set_jobs(rotocr_config* cfg, int jobs);
ROTOCR_API rotocr_status rotocr_config_validate(const rotocr_config* cfg);
/* Result-affecting settings only (jobs and timeout are omitted). */
ROTOCR_API rotocr_status rotocr_config_to_json(const rotocr_config* cfg, char** out);
ROTOCR_API rotocr_status rotocr_config_from_json(const char* json, rotocr_config** out);

/* ---- pipeline ---------------------------------------------------------- */

typedef struct rotocr_pipeline rotocr_pipeline;
typedef struct rotocr_result rotocr_result;

typedef struct rotocr_detection {
    double polygon[8];   /* original-frame coordinates */
    const char* text;    /* borrowed from the result */
    double det_score;
    double rec_score;
    double score;        /* (det_score + rec_score) / 2 */
    double source_angle; /* view that produced it */
} rotocr_detection;

typedef struct rotocr_view_stats {
    double angle;
    size_t detections;
    double seconds;
} rotocr_view_stats;

ROTOCR_API rotocr_status rotocr_fuse_score(double det_score, double rec_score, double* out);

/* Validates cfg and starts the backend workers. */
ROTOCR_API rotocr_status rotocr_pipeline_create(const rotocr_config* cfg, rotocr_pipeline** out);
ROTOCR_API void rotocr_pipeline_destroy(rotocr_pipeline* p);
ROTOCR_API size_t rotocr_pipeline_view_count(const rotocr_pipeline* p);
ROTOCR_API rotocr_status rotocr_pipeline_run(rotocr_pipeline* p, const rotocr_image* img, rotocr_result** out);
/* Back-mapped candidates from every view, before merging. */
ROTOCR_API rotocr_status rotocr_pipeline_collect(rotocr_pipeline* p, const rotocr_image* img, rotocr_result** out);

ROTOCR_API size_t rotocr_result_count(const rotocr_result* r);
ROTOCR_API rotocr_status rotocr_result_get(const rotocr_result* r, size_t index, rotocr_detection* out);
ROTOCR_API size_t rotocr_result_view_count(const rotocr_result* r);
ROTOCR_API rotocr_status rotocr_result_view(const rotocr_result* r, size_t index, rotocr_view_stats* out);
/* One detections-file line per detection, tagged with image_id. */
ROTOCR_API rotocr_status rotocr_result_to_jsonl(const rotocr_result* r, const char* image_id, char** out);
ROTOCR_API void rotocr_result_destroy(rotocr_result* r);

/* ---- evaluation -------------------------------------------------------- */

typedef struct rotocr_eval_report {
    double accuracy;
    double avg_ed;
    double norm_ed;
    size_t samples;
} rotocr_eval_report;

/* Levenshtein distance over code points of two UTF-8 strings. */
ROTOCR_API size_t rotocr_edit_distance(const char* a, const char* b);
ROTOCR_API rotocr_status rotocr_evaluate_files(const char* detections_path, const char* annotations_path,
                                               int case_sensitive, rotocr_eval_report* out);
/* Aligned table (csv == 0) or CSV (csv != 0) of n labelled rows. */
ROTOCR_API rotocr_status rotocr_format_reports(const char* const* labels, const rotocr_eval_report* reports,
                                               size_t n, int csv, char** out);

/* ---- dataset curation -------------------------------------------------- */

/* Exactly 5 labels. ROTOCR_E_UNRESOLVED (and *out == NULL) without a
 * 3-vote majority. */
ROTOCR_API rotocr_status rotocr_majority_vote(const char* const* labels, size_t n, char** out);
/* Fills missing consensus values in an annotation file and writes the result
 * to out_path (may equal in_path). Returns ROTOCR_E_UNRESOLVED when some crops
 * stay open; their ids are listed one per line in *unresolved_ids. */
ROTOCR_API rotocr_status rotocr_consensus_file(const char* in_path, const char* out_path, size_t* voted,
                                               char** unresolved_ids);
ROTOCR_API rotocr_status rotocr_stats_file(const char* annotations_path, double band_degrees, char** text,
                                           char** csv);
/* Copies detection records with score >= threshold from in_path to out_path. */
ROTOCR_API rotocr_status rotocr_select_crops_file(const char* detections_path, double threshold,
                                                  const char* out_path, size_t* kept);

/* ---- synthetic scenes -------------------------------------------------- */

typedef struct rotocr_synth_params {
    uint64_t seed;
    int scenes;
    int instances_per_scene;
    double p_horizontal;
    double band_degrees;
    int canvas_w;
    int canvas_h;
    const char* words_path; /* one word per line; NULL for the built-in list */
} rotocr_synth_params;

ROTOCR_API void rotocr_synth_params_default(rotocr_synth_params* out);
/* Writes out_dir/scenes/scene_NNNN.json and out_dir/annotations.jsonl. */
ROTOCR_API rotocr_status rotocr_generate_corpus(const rotocr_synth_params* params, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* ROTOCR_ROTOCR_H */
