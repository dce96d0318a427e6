#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rotocr/dataset.hpp"
#include "rotocr/imaging.hpp"

namespace rotocr {

/// Name written into every generated scene file; the stream is
/// std::mt19937_64, whose output sequence the C++ standard fixes.
inline constexpr std::string_view kGeneratorName = "mt19937_64";

const std::vector<std::string>& default_words();

struct SynthConfig {
    std::uint64_t seed = 0;
    int scenes = 1;
    int instances_per_scene = 3;
    double p_horizontal = 0.3;  // share of instances drawn inside the band
    double band = 15.0;         // half-width of the horizontal band, degrees
    std::vector<std::string> words = default_words();
    int canvas_w = 1920;
    int canvas_h = 1080;
    int max_attempts = 1000;  // placement retries per instance

    void validate() const;  // Error(Config)
};

/// Seeded scene corpus. Orientation per instance: with probability p uniform
/// in [-band, band], otherwise uniform in [band, 360 - band]; placements are
/// rejection-sampled so no two instance bounding boxes overlap. Throws
/// Error(Generation) when an instance cannot be placed.
std::vector<SceneDescriptor> generate(const SynthConfig& cfg);

/// Scene ids used by generate_corpus: scene_0000, scene_0001, ...
std::string scene_id(std::size_t index);

/// Scene file JSON:
///   {"canvas":[w,h],"generator":s,"seed":n,"instances":[{"text","center":[x,y],"orientation","box":[w,h]}]}
std::string scene_to_json(const SceneDescriptor& scene);
SceneDescriptor scene_from_json(std::string_view text);  // Error(Schema)
SceneDescriptor load_scene(const std::filesystem::path& path);
void save_scene(const SceneDescriptor& scene, const std::filesystem::path& path);

/// Virtual ImageRef with the file stem as id.
ImageRef load_scene_image(const std::filesystem::path& path);

/// Ground-truth annotations for a scene: all five worker labels equal the
/// instance text and consensus is set.
std::vector<CropAnnotation> scene_annotations(const SceneDescriptor& scene, std::string_view image_id);

/// Writes <dir>/scenes/<id>.json for every scene and <dir>/annotations.jsonl.
void write_corpus(const std::vector<SceneDescriptor>& scenes, const std::filesystem::path& dir);

}  // namespace rotocr
