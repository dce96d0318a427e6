// rotocr command-line front end. Everything goes through the C API in
// librotocr; this file only parses flags and writes files.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rotocr/rotocr.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitUnresolved = 3;

int exit_code(rotocr_status s) {
    switch (s) {
        case ROTOCR_OK: return kExitOk;
        case ROTOCR_E_INVALID_ARGUMENT:
        case ROTOCR_E_CONFIG:
        case ROTOCR_E_SCHEMA: return kExitConfig;
        case ROTOCR_E_UNRESOLVED: return kExitUnresolved;
        default: return kExitRuntime;
    }
}

// Carries a C API failure (or a CLI-level one) up to main().
struct Failure : std::runtime_error {
    int code;
    Failure(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

void check(rotocr_status s) {
    if (s != ROTOCR_OK) throw Failure(exit_code(s), rotocr_last_error());
}

bool verbose() {
    const char* v = std::getenv("ROTOCR_LOG");
    return v && (std::string(v) == "info" || std::string(v) == "debug");
}

struct CString {
    char* p = nullptr;
    ~CString() { rotocr_free(p); }
    std::string str() const { return p ? p : ""; }
};

template <typename T, void (*Destroy)(T*)>
struct Handle {
    T* p = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() {
        if (p) Destroy(p);
    }
};

using ConfigHandle = Handle<rotocr_config, rotocr_config_destroy>;
using PipelineHandle = Handle<rotocr_pipeline, rotocr_pipeline_destroy>;
using ImageHandle = Handle<rotocr_image, rotocr_image_destroy>;
using ResultHandle = Handle<rotocr_result, rotocr_result_destroy>;

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Failure(kExitRuntime, "cannot write '" + path.string() + "'");
    out << content;
    if (!out.flush()) throw Failure(kExitRuntime, "cannot write '" + path.string() + "'");
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Failure(kExitRuntime, "cannot create '" + dir.string() + "': " + ec.message());
}

// ---- run ------------------------------------------------------------------

struct Input {
    std::string kind;  // "scene" | "image"
    std::string path;
};

struct RunOptions {
    std::vector<std::string> scenes;
    std::string scenes_dir;
    std::vector<std::string> images;
    std::string from_manifest;
    double rotation_step = 15.0;
    double nms_iou = 0.5;
    std::string backend = "mock";
    double mock_tolerance = 10.0;
    bool mock_corrupt = false;
    double backend_timeout = 60.0;
    int jobs = std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
    std::string out = ".";
};

// Owns output files until commit(); anything not committed is removed.
class PendingOutputs {
public:
    explicit PendingOutputs(fs::path dir) : dir_(std::move(dir)) {}
    ~PendingOutputs() {
        std::error_code ec;
        for (const auto& name : names_) fs::remove(partial(name), ec);
    }

    void stage(const std::string& name, const std::string& content) {
        names_.push_back(name);
        write_text(partial(name), content);
    }

    void commit() {
        for (const auto& name : names_) {
            std::error_code ec;
            fs::rename(partial(name), dir_ / name, ec);
            if (ec) throw Failure(kExitRuntime, "cannot finalize '" + (dir_ / name).string() + "'");
        }
        names_.clear();
    }

private:
    fs::path partial(const std::string& name) const { return dir_ / (name + ".partial"); }

    fs::path dir_;
    std::vector<std::string> names_;
};

std::vector<Input> gather_inputs(const RunOptions& o) {
    std::vector<Input> inputs;
    for (const auto& s : o.scenes) inputs.push_back({"scene", fs::path(s).lexically_normal().string()});
    if (!o.scenes_dir.empty()) {
        std::vector<std::string> found;
        std::error_code ec;
        for (const auto& entry : fs::directory_iterator(o.scenes_dir, ec)) {
            if (entry.is_regular_file() && entry.path().extension() == ".json") {
                found.push_back(entry.path().lexically_normal().string());
            }
        }
        if (ec) throw Failure(kExitRuntime, "cannot list '" + o.scenes_dir + "': " + ec.message());
        std::sort(found.begin(), found.end());
        for (auto& f : found) inputs.push_back({"scene", std::move(f)});
    }
    for (const auto& i : o.images) inputs.push_back({"image", fs::path(i).lexically_normal().string()});
    return inputs;
}

int cmd_run(RunOptions o, bool config_flags_given) {
    ConfigHandle cfg;
    std::vector<Input> inputs;

    if (!o.from_manifest.empty()) {
        if (config_flags_given || !o.scenes.empty() || !o.scenes_dir.empty() || !o.images.empty()) {
            throw Failure(kExitConfig, "--from-manifest takes config and inputs from the manifest; drop other flags");
        }
        std::ifstream in(o.from_manifest);
        if (!in) throw Failure(kExitRuntime, "cannot open manifest '" + o.from_manifest + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        check(rotocr_config_from_json(ss.str().c_str(), &cfg.p));
        json m;
        try {
            m = json::parse(ss.str());
            for (const json& i : m.at("inputs")) {
                inputs.push_back({i.at("kind").get<std::string>(), i.at("path").get<std::string>()});
            }
        } catch (const json::exception& e) {
            throw Failure(kExitConfig, std::string("manifest: ") + e.what());
        }
    } else {
        check(rotocr_config_create(&cfg.p));
        check(rotocr_config_set_rotation_step(cfg.p, o.rotation_step));
        check(rotocr_config_set_nms_iou(cfg.p, o.nms_iou));
        check(rotocr_config_set_mock_tolerance(cfg.p, o.mock_tolerance));
        check(rotocr_config_set_mock_corruption(cfg.p, o.mock_corrupt ? 1 : 0));
        check(rotocr_config_set_backend_timeout(cfg.p, o.backend_timeout));
        check(rotocr_config_set_backend(cfg.p, o.backend.c_str()));
        inputs = gather_inputs(o);
    }
    check(rotocr_config_set_jobs(cfg.p, o.jobs));
    check(rotocr_config_validate(cfg.p));
    if (inputs.empty()) throw Failure(kExitConfig, "no inputs; use --scene, --scenes-dir, --image or --from-manifest");

    CString cfg_json;
    check(rotocr_config_to_json(cfg.p, &cfg_json.p));

    PipelineHandle pipeline;
    check(rotocr_pipeline_create(cfg.p, &pipeline.p));

    const fs::path out_dir(o.out);
    ensure_dir(out_dir);
    PendingOutputs outputs(out_dir);

    std::string detections;
    json manifest_inputs = json::array();
    json manifest_images = json::array();
    json timings = json::array();
    std::set<std::string> seen_ids;

    for (const Input& input : inputs) {
        ImageHandle img;
        if (input.kind == "scene") check(rotocr_image_load_scene(input.path.c_str(), &img.p));
        else if (input.kind == "image") check(rotocr_image_load_png(input.path.c_str(), &img.p));
        else throw Failure(kExitConfig, "unknown input kind '" + input.kind + "'");

        const std::string id = rotocr_image_id(img.p);
        if (!seen_ids.insert(id).second) throw Failure(kExitConfig, "duplicate input id '" + id + "'");
        if (verbose()) std::cerr << "rotocr: " << id << "\n";

        ResultHandle result;
        check(rotocr_pipeline_run(pipeline.p, img.p, &result.p));

        CString lines;
        check(rotocr_result_to_jsonl(result.p, id.c_str(), &lines.p));
        detections += lines.str();

        json dets = json::array();
        std::istringstream ls(lines.str());
        for (std::string line; std::getline(ls, line);) {
            json d = json::parse(line);
            d.erase("image");
            dets.push_back(std::move(d));
        }
        json per_view = json::array();
        json view_seconds = json::array();
        for (size_t v = 0; v < rotocr_result_view_count(result.p); ++v) {
            rotocr_view_stats vs{};
            check(rotocr_result_view(result.p, v, &vs));
            per_view.push_back({{"angle", vs.angle}, {"detections", vs.detections}});
            view_seconds.push_back({{"angle", vs.angle}, {"seconds", vs.seconds}});
        }
        manifest_inputs.push_back({{"id", id}, {"kind", input.kind}, {"path", input.path}});
        manifest_images.push_back({{"id", id}, {"views", per_view}, {"detections", dets}});
        timings.push_back({{"id", id}, {"views", view_seconds}});
    }

    json manifest{{"tool", "rotocr"},
                  {"version", rotocr_version()},
                  {"config", json::parse(cfg_json.str())},
                  {"inputs", manifest_inputs},
                  {"images", manifest_images}};

    outputs.stage("detections.jsonl", detections);
    outputs.stage("manifest.json", manifest.dump(1) + "\n");
    outputs.stage("timings.json", json{{"images", timings}}.dump(1) + "\n");
    outputs.commit();

    std::cout << "wrote " << (out_dir / "detections.jsonl").string() << " (" << inputs.size() << " input(s))\n";
    return kExitOk;
}

// ---- eval -----------------------------------------------------------------

int cmd_eval(const std::vector<std::string>& detection_args, const std::string& annotations, bool case_sensitive,
             const std::string& out) {
    std::vector<std::string> labels;
    std::vector<rotocr_eval_report> reports;
    for (const std::string& arg : detection_args) {
        std::string label = arg;
        std::string path = arg;
        if (const auto eq = arg.find('='); eq != std::string::npos) {
            label = arg.substr(0, eq);
            path = arg.substr(eq + 1);
        }
        rotocr_eval_report r{};
        check(rotocr_evaluate_files(path.c_str(), annotations.c_str(), case_sensitive ? 1 : 0, &r));
        labels.push_back(label);
        reports.push_back(r);
    }
    std::vector<const char*> label_ptrs;
    for (const auto& l : labels) label_ptrs.push_back(l.c_str());

    CString table;
    check(rotocr_format_reports(label_ptrs.data(), reports.data(), reports.size(), 0, &table.p));
    std::cout << table.str();
    if (!out.empty()) {
        CString csv;
        check(rotocr_format_reports(label_ptrs.data(), reports.data(), reports.size(), 1, &csv.p));
        ensure_dir(out);
        write_text(fs::path(out) / "report.txt", table.str());
        write_text(fs::path(out) / "report.csv", csv.str());
    }
    return kExitOk;
}

// ---- consensus / stats / generate / select ---------------------------------

int cmd_consensus(const std::string& path, const std::string& out) {
    size_t voted = 0;
    CString unresolved;
    const std::string target = out.empty() ? path : out;
    const rotocr_status s = rotocr_consensus_file(path.c_str(), target.c_str(), &voted, &unresolved.p);
    if (s != ROTOCR_OK && s != ROTOCR_E_UNRESOLVED) check(s);
    std::cout << "voted: " << voted << "\n";
    if (s == ROTOCR_E_UNRESOLVED) {
        std::cout << "unresolved (edit \"consensus\" in " << target << " by hand):\n";
        std::istringstream ids(unresolved.str());
        for (std::string id; std::getline(ids, id);) std::cout << "  " << id << "\n";
        return kExitUnresolved;
    }
    return kExitOk;
}

int cmd_stats(const std::string& path, double band, const std::string& out) {
    CString text;
    CString csv;
    check(rotocr_stats_file(path.c_str(), band, &text.p, &csv.p));
    std::cout << text.str();
    if (!out.empty()) {
        ensure_dir(out);
        write_text(fs::path(out) / "stats.txt", text.str());
        write_text(fs::path(out) / "stats.csv", csv.str());
    }
    return kExitOk;
}

int cmd_generate(rotocr_synth_params params, const std::string& canvas, const std::string& words,
                 const std::string& out) {
    if (!canvas.empty()) {
        int w = 0;
        int h = 0;
        char tail = 0;
        if (std::sscanf(canvas.c_str(), "%dx%d%c", &w, &h, &tail) != 2) {
            throw Failure(kExitConfig, "--canvas expects WIDTHxHEIGHT, got '" + canvas + "'");
        }
        params.canvas_w = w;
        params.canvas_h = h;
    }
    params.words_path = words.empty() ? nullptr : words.c_str();
    check(rotocr_generate_corpus(&params, out.c_str()));
    std::cout << "wrote " << params.scenes << " scene(s) to " << (fs::path(out) / "scenes").string() << " and "
              << (fs::path(out) / "annotations.jsonl").string() << "\n";
    return kExitOk;
}

int cmd_select(const std::string& detections, double threshold, const std::string& out) {
    size_t kept = 0;
    check(rotocr_select_crops_file(detections.c_str(), threshold, out.c_str(), &kept));
    std::cout << "kept " << kept << " crop(s) with score >= " << threshold << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rotocr: rotate-and-merge OCR, evaluation and dataset tooling"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(rotocr_version()));

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "run rotate-and-merge over scenes or images");
    run_cmd->add_option("--scene", run.scenes, "virtual scene JSON file (repeatable)");
    run_cmd->add_option("--scenes-dir", run.scenes_dir, "directory of scene JSON files");
    run_cmd->add_option("--image", run.images, "PNG image (repeatable; needs a cmd: backend)");
    run_cmd->add_option("--from-manifest", run.from_manifest, "re-run config and inputs of a manifest");
    auto* o_step = run_cmd->add_option("--rotation-step", run.rotation_step, "degrees between views; must divide 360");
    auto* o_iou = run_cmd->add_option("--nms-iou", run.nms_iou, "NMS IoU threshold in (0,1)");
    auto* o_backend = run_cmd->add_option("--backend", run.backend, "mock | cmd:<command>");
    auto* o_tol = run_cmd->add_option("--mock-tolerance", run.mock_tolerance, "mock readable range, degrees");
    auto* o_corrupt = run_cmd->add_flag("--mock-corrupt", run.mock_corrupt, "mock misreads near its tolerance edge");
    run_cmd->add_option("--backend-timeout", run.backend_timeout, "seconds to wait for a backend response");
    run_cmd->add_option("--jobs", run.jobs, "parallel views (default: processors)");
    run_cmd->add_option("--out", run.out, "output directory");

    std::vector<std::string> eval_dets;
    std::string eval_ann;
    bool eval_case = false;
    std::string eval_out;
    auto* eval_cmd = app.add_subcommand("eval", "score detections against annotations");
    eval_cmd->add_option("--detections", eval_dets, "[label=]detections.jsonl (repeatable, one row each)")->required();
    eval_cmd->add_option("--annotations", eval_ann, "annotations.jsonl")->required();
    eval_cmd->add_flag("--case-sensitive", eval_case, "compare without lowercasing");
    eval_cmd->add_option("--out", eval_out, "directory for report.txt and report.csv");

    std::string cons_path;
    std::string cons_out;
    auto* cons_cmd = app.add_subcommand("consensus", "fill consensus labels by 5-way majority vote");
    cons_cmd->add_option("annotations", cons_path, "annotations.jsonl")->required();
    cons_cmd->add_option("--out", cons_out, "write here instead of in place");

    std::string stats_path;
    double stats_band = 15.0;
    std::string stats_out;
    auto* stats_cmd = app.add_subcommand("stats", "dataset statistics");
    stats_cmd->add_option("annotations", stats_path, "annotations.jsonl")->required();
    stats_cmd->add_option("--band", stats_band, "horizontal band half-width, degrees");
    stats_cmd->add_option("--out", stats_out, "directory for stats.txt and stats.csv");

    rotocr_synth_params gen{};
    rotocr_synth_params_default(&gen);
    std::string gen_canvas;
    std::string gen_words;
    std::string gen_out = ".";
    auto* gen_cmd = app.add_subcommand("generate", "generate a synthetic scene corpus");
    gen_cmd->add_option("--seed", gen.seed, "RNG seed");
    gen_cmd->add_option("--scenes", gen.scenes, "number of scenes");
    gen_cmd->add_option("--instances", gen.instances_per_scene, "text instances per scene");
    gen_cmd->add_option("--p-horizontal", gen.p_horizontal, "share of instances inside the horizontal band");
    gen_cmd->add_option("--band", gen.band_degrees, "horizontal band half-width, degrees");
    gen_cmd->add_option("--canvas", gen_canvas, "canvas size WIDTHxHEIGHT (default 1920x1080)");
    gen_cmd->add_option("--words", gen_words, "word list file, one per line");
    gen_cmd->add_option("--out", gen_out, "output directory");

    std::string sel_dets;
    double sel_threshold = 0.5;
    std::string sel_out;
    auto* sel_cmd = app.add_subcommand("select", "keep detections whose fused score clears a threshold");
    sel_cmd->add_option("--detections", sel_dets, "detections.jsonl")->required();
    sel_cmd->add_option("--threshold", sel_threshold, "minimum fused score");
    sel_cmd->add_option("--out", sel_out, "output JSON-lines file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*run_cmd) {
            const bool config_flags = o_step->count() || o_iou->count() || o_backend->count() || o_tol->count() ||
                                      o_corrupt->count();
            return cmd_run(run, config_flags);
        }
        if (*eval_cmd) return cmd_eval(eval_dets, eval_ann, eval_case, eval_out);
        if (*cons_cmd) return cmd_consensus(cons_path, cons_out);
        if (*stats_cmd) return cmd_stats(stats_path, stats_band, stats_out);
        if (*gen_cmd) return cmd_generate(gen, gen_canvas, gen_words, gen_out);
        if (*sel_cmd) return cmd_select(sel_dets, sel_threshold, sel_out);
    } catch (const Failure& f) {
        std::cerr << "rotocr: " << f.what() << "\n";
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "rotocr: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
