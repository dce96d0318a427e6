#include <png.h>

#include <cstring>

#include "rotocr/error.hpp"
#include "rotocr/imaging.hpp"

namespace rotocr {

namespace {

struct PngImage {
    png_image image;

    PngImage() {
        std::memset(&image, 0, sizeof image);
        image.version = PNG_IMAGE_VERSION;
    }
    ~PngImage() { png_image_free(&image); }
    PngImage(const PngImage&) = delete;
    PngImage& operator=(const PngImage&) = delete;
};

}  // namespace

Raster load_png(const std::filesystem::path& path) {
    PngImage png;
    if (!png_image_begin_read_from_file(&png.image, path.c_str())) {
        throw Error(ErrorKind::Io, "cannot read PNG '" + path.string() + "': " + png.image.message);
    }
    png.image.format = PNG_FORMAT_RGB;
    Raster out(static_cast<int>(png.image.width), static_cast<int>(png.image.height));
    if (!png_image_finish_read(&png.image, nullptr, out.rgb.data(), 0, nullptr)) {
        throw Error(ErrorKind::Io, "cannot decode PNG '" + path.string() + "': " + png.image.message);
    }
    return out;
}

void save_png(const Raster& raster, const std::filesystem::path& path) {
    PngImage png;
    png.image.width = static_cast<png_uint_32>(raster.width);
    png.image.height = static_cast<png_uint_32>(raster.height);
    png.image.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&png.image, path.c_str(), 0, raster.rgb.data(), 0, nullptr)) {
        throw Error(ErrorKind::Io, "cannot write PNG '" + path.string() + "': " + png.image.message);
    }
}

}  // namespace rotocr
