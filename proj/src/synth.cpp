#include "rotocr/synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "rotocr/error.hpp"
#include "rotocr/utf8.hpp"

namespace rotocr {

using nlohmann::json;

namespace {

// Portable [0, 1) from the top 53 bits; std::uniform_real_distribution is
// implementation-defined and would break cross-platform reproduction.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

struct Aabb {
    double x0, y0, x1, y1;

    bool overlaps(const Aabb& o) const { return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1; }
};

[[noreturn]] void bad_scene(const std::string& what) { throw Error(ErrorKind::Schema, "invalid scene: " + what); }

double number_at(const json& arr, std::size_t k, const char* field) {
    if (!arr[k].is_number()) bad_scene(std::string("'") + field + "' must hold numbers");
    return arr[k].get<double>();
}

}  // namespace

const std::vector<std::string>& default_words() {
    static const std::vector<std::string> words{
        "salt", "pepper", "oil", "olive oil", "sugar", "flour", "milk", "butter", "rice", "pasta",
        "vinegar", "honey", "tea", "coffee", "cereal", "yogurt", "bread", "eggs", "cheese", "ketchup",
        "mustard", "soy sauce", "paprika", "oregano", "basil", "cumin", "garlic", "onion", "tomato", "lemon",
    };
    return words;
}

void SynthConfig::validate() const {
    if (scenes < 0) throw Error(ErrorKind::Config, "scene count must be >= 0");
    if (instances_per_scene < 0) throw Error(ErrorKind::Config, "instances per scene must be >= 0");
    if (!(p_horizontal >= 0.0 && p_horizontal <= 1.0)) {
        throw Error(ErrorKind::Config, "horizontal fraction must lie in [0, 1]");
    }
    if (!(band > 0.0 && band < 90.0)) throw Error(ErrorKind::Config, "horizontal band must lie in (0, 90) degrees");
    if (words.empty()) throw Error(ErrorKind::Config, "word list is empty");
    for (const std::string& w : words) {
        if (w.empty()) throw Error(ErrorKind::Config, "word list contains an empty word");
    }
    if (canvas_w < 1 || canvas_h < 1) throw Error(ErrorKind::Config, "canvas must be at least 1x1");
    if (max_attempts < 1) throw Error(ErrorKind::Config, "placement attempts must be >= 1");
}

std::vector<SceneDescriptor> generate(const SynthConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::vector<SceneDescriptor> scenes;
    scenes.reserve(static_cast<std::size_t>(cfg.scenes));

    for (int s = 0; s < cfg.scenes; ++s) {
        SceneDescriptor scene;
        scene.canvas_w = cfg.canvas_w;
        scene.canvas_h = cfg.canvas_h;
        scene.generator = std::string(kGeneratorName);
        scene.seed = cfg.seed;
        std::vector<Aabb> placed;

        for (int k = 0; k < cfg.instances_per_scene; ++k) {
            TextInstance inst;
            const auto word_index = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(cfg.words.size()));
            inst.text = cfg.words[std::min(word_index, cfg.words.size() - 1)];

            const bool horizontal = uniform01(rng) < cfg.p_horizontal;
            const double raw = horizontal ? uniform(rng, -cfg.band, cfg.band) : uniform(rng, cfg.band, 360.0 - cfg.band);
            inst.orientation = normalize_degrees(raw);

            inst.box_h = uniform(rng, 40.0, 80.0);
            inst.box_w = inst.box_h * (0.55 * static_cast<double>(utf8::length(inst.text)) + 0.6);

            const double c = std::abs(cos_deg(inst.orientation));
            const double sn = std::abs(sin_deg(inst.orientation));
            const double half_w = 0.5 * (inst.box_w * c + inst.box_h * sn);
            const double half_h = 0.5 * (inst.box_w * sn + inst.box_h * c);
            if (2.0 * half_w > cfg.canvas_w || 2.0 * half_h > cfg.canvas_h) {
                throw Error(ErrorKind::Generation,
                            "text '" + inst.text + "' does not fit the canvas; use a larger canvas");
            }

            bool ok = false;
            for (int attempt = 0; attempt < cfg.max_attempts && !ok; ++attempt) {
                const double cx = uniform(rng, half_w, cfg.canvas_w - half_w);
                const double cy = uniform(rng, half_h, cfg.canvas_h - half_h);
                const Aabb box{cx - half_w, cy - half_h, cx + half_w, cy + half_h};
                ok = std::none_of(placed.begin(), placed.end(), [&](const Aabb& o) { return o.overlaps(box); });
                if (ok) {
                    inst.center = {cx, cy};
                    placed.push_back(box);
                }
            }
            if (!ok) {
                throw Error(ErrorKind::Generation, "could not place instance " + std::to_string(k) + " of scene " +
                                                       std::to_string(s) + " after " +
                                                       std::to_string(cfg.max_attempts) +
                                                       " attempts; use a larger canvas or fewer instances");
            }
            scene.instances.push_back(std::move(inst));
        }
        scenes.push_back(std::move(scene));
    }
    return scenes;
}

std::string scene_id(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "scene_%04zu", index);
    return buf;
}

std::string scene_to_json(const SceneDescriptor& scene) {
    json instances = json::array();
    for (const TextInstance& t : scene.instances) {
        instances.push_back({{"text", t.text},
                             {"center", {t.center.x, t.center.y}},
                             {"orientation", t.orientation},
                             {"box", {t.box_w, t.box_h}}});
    }
    json j{{"canvas", {scene.canvas_w, scene.canvas_h}},
           {"generator", scene.generator},
           {"seed", scene.seed},
           {"instances", instances}};
    return j.dump(1);
}

SceneDescriptor scene_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        bad_scene(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) bad_scene("top level must be an object");
    if (!j.contains("canvas") || !j["canvas"].is_array() || j["canvas"].size() != 2) {
        bad_scene("'canvas' must be [width, height]");
    }
    if (!j.contains("instances") || !j["instances"].is_array()) bad_scene("'instances' must be an array");

    SceneDescriptor scene;
    const double w = number_at(j["canvas"], 0, "canvas");
    const double h = number_at(j["canvas"], 1, "canvas");
    if (w != std::floor(w) || h != std::floor(h) || w < 1 || h < 1 || w > 1e6 || h > 1e6) {
        bad_scene("'canvas' must hold positive integers");
    }
    scene.canvas_w = static_cast<int>(w);
    scene.canvas_h = static_cast<int>(h);
    if (j.contains("generator")) {
        if (!j["generator"].is_string()) bad_scene("'generator' must be a string");
        scene.generator = j["generator"].get<std::string>();
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() >= 0)) {
            bad_scene("'seed' must be a non-negative integer");
        }
        scene.seed = j["seed"].get<std::uint64_t>();
    }
    for (const json& inst : j["instances"]) {
        if (!inst.is_object()) bad_scene("instances must be objects");
        for (const char* f : {"text", "center", "orientation", "box"}) {
            if (!inst.contains(f)) bad_scene(std::string("instance missing field '") + f + "'");
        }
        if (!inst["text"].is_string()) bad_scene("'text' must be a string");
        if (!inst["center"].is_array() || inst["center"].size() != 2) bad_scene("'center' must be [x, y]");
        if (!inst["box"].is_array() || inst["box"].size() != 2) bad_scene("'box' must be [w, h]");
        if (!inst["orientation"].is_number()) bad_scene("'orientation' must be a number");
        TextInstance t;
        t.text = inst["text"].get<std::string>();
        t.center = {number_at(inst["center"], 0, "center"), number_at(inst["center"], 1, "center")};
        t.orientation = inst["orientation"].get<double>();
        t.box_w = number_at(inst["box"], 0, "box");
        t.box_h = number_at(inst["box"], 1, "box");
        scene.instances.push_back(std::move(t));
    }
    try {
        validate(scene);
    } catch (const Error& e) {
        bad_scene(e.what());
    }
    return scene;
}

SceneDescriptor load_scene(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open scene '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return scene_from_json(ss.str());
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

void save_scene(const SceneDescriptor& scene, const std::filesystem::path& path) {
    write_file_atomic(path, scene_to_json(scene) + "\n");
}

ImageRef load_scene_image(const std::filesystem::path& path) {
    return ImageRef::from_scene(load_scene(path), path.stem().string());
}

std::vector<CropAnnotation> scene_annotations(const SceneDescriptor& scene, std::string_view image_id) {
    std::vector<CropAnnotation> out;
    out.reserve(scene.instances.size());
    for (std::size_t k = 0; k < scene.instances.size(); ++k) {
        const TextInstance& t = scene.instances[k];
        CropAnnotation a{std::string(image_id) + "/" + std::to_string(k), std::string(image_id), t.box(),
                         t.orientation, {}, t.text};
        a.workers.fill(t.text);
        out.push_back(std::move(a));
    }
    return out;
}

void write_corpus(const std::vector<SceneDescriptor>& scenes, const std::filesystem::path& dir) {
    const auto scene_dir = dir / "scenes";
    std::error_code ec;
    std::filesystem::create_directories(scene_dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create '" + scene_dir.string() + "': " + ec.message());
    std::vector<CropAnnotation> all;
    for (std::size_t i = 0; i < scenes.size(); ++i) {
        const std::string id = scene_id(i);
        save_scene(scenes[i], scene_dir / (id + ".json"));
        auto ann = scene_annotations(scenes[i], id);
        std::move(ann.begin(), ann.end(), std::back_inserter(all));
    }
    write_annotations(dir / "annotations.jsonl", all);
}

}  // namespace rotocr
