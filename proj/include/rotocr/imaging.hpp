#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "rotocr/geometry.hpp"

namespace rotocr {

/// 8-bit interleaved RGB bitmap, row-major, origin at the top-left corner.
/// Pixel (i, j) covers [i, i+1) x [j, j+1); its centre is (i + 0.5, j + 0.5).
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    Raster() = default;
    Raster(int w, int h);  // black

    std::uint8_t* pixel(int x, int y) { return rgb.data() + 3 * (static_cast<std::size_t>(y) * width + x); }
    const std::uint8_t* pixel(int x, int y) const {
        return rgb.data() + 3 * (static_cast<std::size_t>(y) * width + x);
    }

    friend bool operator==(const Raster&, const Raster&) = default;
};

struct TextInstance {
    std::string text;
    Point center;
    double orientation = 0.0;  // degrees CCW, [0, 360)
    double box_w = 0.0;
    double box_h = 0.0;

    Quad box() const { return Quad::oriented_rect(center, box_w, box_h, orientation); }

    friend bool operator==(const TextInstance&, const TextInstance&) = default;
};

/// Metadata-only stand-in for an image: what text is where, at which angle.
struct SceneDescriptor {
    int canvas_w = 0;
    int canvas_h = 0;
    std::vector<TextInstance> instances;
    std::string generator;  // RNG name for generated scenes, empty otherwise
    std::uint64_t seed = 0;

    friend bool operator==(const SceneDescriptor&, const SceneDescriptor&) = default;
};

/// Throws Error(InvalidInput) naming the first violated invariant.
void validate(const SceneDescriptor& scene);

struct RotatedImage;

/// Immutable image handle: a raster bitmap or a virtual scene. Copies share
/// the underlying content.
class ImageRef {
public:
    static ImageRef from_raster(Raster raster, std::string id);
    static ImageRef from_scene(SceneDescriptor scene, std::string id);

    bool is_raster() const noexcept { return std::holds_alternative<RasterPtr>(content_); }
    bool is_virtual() const noexcept { return !is_raster(); }

    /// Throw Error(InvalidInput) when the variant does not match.
    const Raster& raster() const;
    const SceneDescriptor& scene() const;

    const std::string& id() const noexcept { return id_; }
    int width() const noexcept;
    int height() const noexcept;

private:
    friend RotatedImage rotate_image(const ImageRef& img, double degrees);

    using RasterPtr = std::shared_ptr<const Raster>;
    using ScenePtr = std::shared_ptr<const SceneDescriptor>;

    ImageRef(std::variant<RasterPtr, ScenePtr> content, std::string id)
        : content_(std::move(content)), id_(std::move(id)) {}

    std::variant<RasterPtr, ScenePtr> content_;
    std::string id_;
};

struct CanvasSize {
    int width = 0;
    int height = 0;
};

/// Smallest canvas that holds a w x h image rotated by `degrees`.
CanvasSize rotated_canvas(int w, int h, double degrees);

/// Transform taking original-frame coordinates to the expanded rotated canvas
/// (pivot at the original centre).
RotationTransform canvas_rotation(int w, int h, double degrees);

struct RotatedImage {
    ImageRef image;
    RotationTransform transform;
};

/// Rotates about the image centre onto an expanded canvas. Rasters use exact
/// pixel permutation for multiples of 90 degrees and bilinear resampling
/// otherwise, with exposed canvas filled black. Virtual scenes have their
/// centres mapped and orientations advanced by the same angle.
RotatedImage rotate_image(const ImageRef& img, double degrees);

/// Crops the axis-aligned bounds of `q` (clamped to the canvas) and resamples
/// them bilinearly to out_w x out_h. Raster only.
ImageRef crop_and_resize(const ImageRef& img, const Quad& q, int out_w, int out_h);

/// Bilinear sample where pixel (i, j) sits at exactly (i, j); out-of-range
/// coordinates clamp to the border.
void sample_bilinear(const Raster& src, double x, double y, std::uint8_t out[3]);

Raster load_png(const std::filesystem::path& path);
void save_png(const Raster& raster, const std::filesystem::path& path);

/// PNG -> raster ImageRef with the file stem as id.
ImageRef load_image(const std::filesystem::path& path);
void save_image(const ImageRef& img, const std::filesystem::path& path);

}  // namespace rotocr
