#include "rotocr/imaging.hpp"

#include <algorithm>
#include <cmath>

#include "rotocr/error.hpp"

namespace rotocr {

namespace {

// Absorbs rounding noise such as 1080.0000000000002 before taking the ceiling.
int ceil_px(double v) { return static_cast<int>(std::ceil(v - 1e-9)); }

std::uint8_t to_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

Raster rotate_quarter(const Raster& src, int turns) {
    const int w = src.width;
    const int h = src.height;
    Raster dst = (turns % 2 == 0) ? Raster(w, h) : Raster(h, w);
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            int x = i;
            int y = j;
            switch (turns) {
                case 1: x = h - 1 - j; y = i; break;
                case 2: x = w - 1 - i; y = h - 1 - j; break;
                case 3: x = j; y = w - 1 - i; break;
                default: break;
            }
            std::copy_n(src.pixel(i, j), 3, dst.pixel(x, y));
        }
    }
    return dst;
}

Raster rotate_bilinear(const Raster& src, const RotationTransform& forward, CanvasSize canvas) {
    Raster dst(canvas.width, canvas.height);
    const RotationTransform back = invert_transform(forward);
    for (int j = 0; j < canvas.height; ++j) {
        for (int i = 0; i < canvas.width; ++i) {
            const Point p = apply_transform(back, Point{i + 0.5, j + 0.5});
            if (p.x < 0.0 || p.y < 0.0 || p.x > src.width || p.y > src.height) continue;
            sample_bilinear(src, p.x - 0.5, p.y - 0.5, dst.pixel(i, j));
        }
    }
    return dst;
}

}  // namespace

Raster::Raster(int w, int h) : width(w), height(h) {
    if (w < 1 || h < 1) throw Error(ErrorKind::InvalidInput, "raster dimensions must be >= 1");
    rgb.assign(static_cast<std::size_t>(w) * h * 3, 0);
}

void validate(const SceneDescriptor& scene) {
    if (scene.canvas_w < 1 || scene.canvas_h < 1) {
        throw Error(ErrorKind::InvalidInput, "scene canvas must be at least 1x1");
    }
    for (std::size_t k = 0; k < scene.instances.size(); ++k) {
        const TextInstance& t = scene.instances[k];
        const std::string where = "instance " + std::to_string(k) + ": ";
        if (t.text.empty()) throw Error(ErrorKind::InvalidInput, where + "text is empty");
        if (!(t.box_w > 0.0) || !(t.box_h > 0.0) || !std::isfinite(t.box_w) || !std::isfinite(t.box_h)) {
            throw Error(ErrorKind::InvalidInput, where + "box size must be positive");
        }
        if (!std::isfinite(t.orientation) || t.orientation < 0.0 || t.orientation >= 360.0) {
            throw Error(ErrorKind::InvalidInput, where + "orientation must lie in [0, 360)");
        }
        if (!is_finite(t.center) || t.center.x < 0.0 || t.center.y < 0.0 || t.center.x > scene.canvas_w ||
            t.center.y > scene.canvas_h) {
            throw Error(ErrorKind::InvalidInput, where + "centre lies outside the canvas");
        }
    }
}

ImageRef ImageRef::from_raster(Raster raster, std::string id) {
    if (raster.width < 1 || raster.height < 1 ||
        raster.rgb.size() != static_cast<std::size_t>(raster.width) * raster.height * 3) {
        throw Error(ErrorKind::InvalidInput, "raster buffer does not match its dimensions");
    }
    return ImageRef(std::make_shared<const Raster>(std::move(raster)), std::move(id));
}

ImageRef ImageRef::from_scene(SceneDescriptor scene, std::string id) {
    validate(scene);
    return ImageRef(std::make_shared<const SceneDescriptor>(std::move(scene)), std::move(id));
}

const Raster& ImageRef::raster() const {
    if (!is_raster()) throw Error(ErrorKind::InvalidInput, "image '" + id_ + "' is not a raster");
    return *std::get<RasterPtr>(content_);
}

const SceneDescriptor& ImageRef::scene() const {
    if (!is_virtual()) throw Error(ErrorKind::InvalidInput, "image '" + id_ + "' is not a virtual scene");
    return *std::get<ScenePtr>(content_);
}

int ImageRef::width() const noexcept {
    return is_raster() ? std::get<RasterPtr>(content_)->width : std::get<ScenePtr>(content_)->canvas_w;
}

int ImageRef::height() const noexcept {
    return is_raster() ? std::get<RasterPtr>(content_)->height : std::get<ScenePtr>(content_)->canvas_h;
}

CanvasSize rotated_canvas(int w, int h, double degrees) {
    const double c = std::abs(cos_deg(degrees));
    const double s = std::abs(sin_deg(degrees));
    return {ceil_px(w * c + h * s), ceil_px(w * s + h * c)};
}

RotationTransform canvas_rotation(int w, int h, double degrees) {
    const CanvasSize canvas = rotated_canvas(w, h, degrees);
    return RotationTransform(degrees, Point{0.5 * w, 0.5 * h},
                             Point{0.5 * (canvas.width - w), 0.5 * (canvas.height - h)});
}

RotatedImage rotate_image(const ImageRef& img, double degrees) {
    if (!std::isfinite(degrees)) throw Error(ErrorKind::InvalidInput, "rotation angle is not finite");
    const double angle = normalize_degrees(degrees);
    if (angle == 0.0) return {img, RotationTransform::identity()};

    const RotationTransform t = canvas_rotation(img.width(), img.height(), angle);
    const CanvasSize canvas = rotated_canvas(img.width(), img.height(), angle);

    if (img.is_raster()) {
        const Raster& src = img.raster();
        Raster out;
        if (angle == 90.0) out = rotate_quarter(src, 1);
        else if (angle == 180.0) out = rotate_quarter(src, 2);
        else if (angle == 270.0) out = rotate_quarter(src, 3);
        else out = rotate_bilinear(src, t, canvas);
        return {ImageRef::from_raster(std::move(out), img.id()), t};
    }

    const SceneDescriptor& src = img.scene();
    SceneDescriptor out = src;
    out.canvas_w = canvas.width;
    out.canvas_h = canvas.height;
    for (TextInstance& inst : out.instances) {
        inst.center = apply_transform(t, inst.center);
        inst.orientation = normalize_degrees(inst.orientation + angle);
    }
    // Skip validate(): mapped centres may sit a rounding error past the border.
    return {ImageRef(std::make_shared<const SceneDescriptor>(std::move(out)), img.id()), t};
}

void sample_bilinear(const Raster& src, double x, double y, std::uint8_t out[3]) {
    x = std::clamp(x, 0.0, static_cast<double>(src.width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(src.height - 1));
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, src.width - 1);
    const int y1 = std::min(y0 + 1, src.height - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const std::uint8_t* p00 = src.pixel(x0, y0);
    const std::uint8_t* p10 = src.pixel(x1, y0);
    const std::uint8_t* p01 = src.pixel(x0, y1);
    const std::uint8_t* p11 = src.pixel(x1, y1);
    for (int c = 0; c < 3; ++c) {
        const double top = p00[c] * (1.0 - fx) + p10[c] * fx;
        const double bottom = p01[c] * (1.0 - fx) + p11[c] * fx;
        out[c] = to_u8(top * (1.0 - fy) + bottom * fy);
    }
}

ImageRef crop_and_resize(const ImageRef& img, const Quad& q, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1) throw Error(ErrorKind::InvalidInput, "crop output size must be >= 1");
    const Raster& src = img.raster();

    double min_x = q[0].x, max_x = q[0].x, min_y = q[0].y, max_y = q[0].y;
    for (const Point& p : q.vertices()) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const double x0 = std::max(0.0, min_x);
    const double y0 = std::max(0.0, min_y);
    const double x1 = std::min(static_cast<double>(src.width), max_x);
    const double y1 = std::min(static_cast<double>(src.height), max_y);
    if (x1 <= x0 || y1 <= y0) throw Error(ErrorKind::EmptyCrop, "crop region lies outside the canvas");

    Raster out(out_w, out_h);
    const double sx = (x1 - x0) / out_w;
    const double sy = (y1 - y0) / out_h;
    for (int v = 0; v < out_h; ++v) {
        for (int u = 0; u < out_w; ++u) {
            sample_bilinear(src, x0 + (u + 0.5) * sx - 0.5, y0 + (v + 0.5) * sy - 0.5, out.pixel(u, v));
        }
    }
    return ImageRef::from_raster(std::move(out), img.id());
}

ImageRef load_image(const std::filesystem::path& path) {
    return ImageRef::from_raster(load_png(path), path.stem().string());
}

void save_image(const ImageRef& img, const std::filesystem::path& path) { save_png(img.raster(), path); }

}  // namespace rotocr
