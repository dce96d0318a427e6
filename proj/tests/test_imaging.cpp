#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include <unistd.h>

#include "rotocr/error.hpp"
#include "rotocr/imaging.hpp"

using namespace rotocr;
namespace fs = std::filesystem;

namespace {

Raster random_raster(int w, int h, std::uint64_t seed) {
    Raster r(w, h);
    std::mt19937_64 rng(seed);
    for (auto& b : r.rgb) b = static_cast<std::uint8_t>(rng() & 0xff);
    return r;
}

// R follows x, G follows y.
Raster gradient(int w, int h) {
    Raster r(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            r.pixel(x, y)[0] = static_cast<std::uint8_t>(x);
            r.pixel(x, y)[1] = static_cast<std::uint8_t>(y);
            r.pixel(x, y)[2] = 7;
        }
    }
    return r;
}

fs::path temp_path(const std::string& name) {
    return fs::temp_directory_path() / ("rotocr-imaging-" + std::to_string(::getpid()) + "-" + name);
}

SceneDescriptor sample_scene() {
    SceneDescriptor s;
    s.canvas_w = 640;
    s.canvas_h = 480;
    s.instances = {{"salt", {100, 120}, 0, 80, 30}, {"pepper", {400, 300}, 133.5, 120, 40},
                   {"oil", {600, 50}, 350, 60, 25}};
    return s;
}

}  // namespace

TEST(Canvas, Sizes) {
    const CanvasSize quarter = rotated_canvas(1920, 1080, 90);
    EXPECT_EQ(quarter.width, 1080);
    EXPECT_EQ(quarter.height, 1920);
    // ceil(1920 cos15 + 1080 sin15), ceil(1920 sin15 + 1080 cos15), mpmath
    const CanvasSize c15 = rotated_canvas(1920, 1080, 15);
    EXPECT_EQ(c15.width, 2135);
    EXPECT_EQ(c15.height, 1541);
    const CanvasSize zero = rotated_canvas(1920, 1080, 0);
    EXPECT_EQ(zero.width, 1920);
    EXPECT_EQ(zero.height, 1080);
}

TEST(Canvas, NeverClipsCorners) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ang(0, 360);
    std::uniform_int_distribution<int> side(1, 3000);
    for (int i = 0; i < 500; ++i) {
        const int w = side(rng), h = side(rng);
        const double a = ang(rng);
        const CanvasSize c = rotated_canvas(w, h, a);
        const RotationTransform t = canvas_rotation(w, h, a);
        for (Point p : {Point{0, 0}, Point{double(w), 0}, Point{double(w), double(h)}, Point{0, double(h)}}) {
            const Point q = apply_transform(t, p);
            EXPECT_GE(q.x, -1e-6);
            EXPECT_GE(q.y, -1e-6);
            EXPECT_LE(q.x, c.width + 1e-6);
            EXPECT_LE(q.y, c.height + 1e-6);
        }
    }
}

TEST(RotateRaster, ZeroIsIdentity) {
    const ImageRef img = ImageRef::from_raster(random_raster(17, 9, 1), "r");
    const RotatedImage r = rotate_image(img, 0);
    EXPECT_TRUE(r.transform.is_identity());
    EXPECT_EQ(r.image.raster(), img.raster());
    EXPECT_EQ(rotate_image(img, 360).image.raster(), img.raster());
}

TEST(RotateRaster, FourQuarterTurnsAreLossless) {
    const ImageRef img = ImageRef::from_raster(random_raster(23, 11, 2), "r");
    ImageRef cur = img;
    for (int k = 0; k < 4; ++k) cur = rotate_image(cur, 90).image;
    EXPECT_EQ(cur.raster(), img.raster());
}

TEST(RotateRaster, QuarterTurnPermutationMatchesTransform) {
    const Raster src = random_raster(13, 7, 4);
    const ImageRef img = ImageRef::from_raster(src, "r");
    for (double a : {90.0, 180.0, 270.0}) {
        const RotatedImage r = rotate_image(img, a);
        const Raster& dst = r.image.raster();
        for (int j = 0; j < src.height; ++j) {
            for (int i = 0; i < src.width; ++i) {
                const Point c = apply_transform(r.transform, {i + 0.5, j + 0.5});
                const int di = static_cast<int>(std::floor(c.x));
                const int dj = static_cast<int>(std::floor(c.y));
                ASSERT_GE(di, 0);
                ASSERT_LT(di, dst.width);
                ASSERT_GE(dj, 0);
                ASSERT_LT(dj, dst.height);
                EXPECT_NEAR(c.x - di, 0.5, 1e-9);
                EXPECT_NEAR(c.y - dj, 0.5, 1e-9);
                for (int ch = 0; ch < 3; ++ch) EXPECT_EQ(dst.pixel(di, dj)[ch], src.pixel(i, j)[ch]);
            }
        }
    }
}

TEST(RotateRaster, ArbitraryAngleFillsBlackAndKeepsCentre) {
    Raster src(41, 41);
    for (auto& b : src.rgb) b = 200;
    const RotatedImage r = rotate_image(ImageRef::from_raster(src, "w"), 30);
    const Raster& dst = r.image.raster();
    EXPECT_EQ(dst.width, rotated_canvas(41, 41, 30).width);
    EXPECT_EQ(dst.pixel(0, 0)[0], 0);
    const Point c = apply_transform(r.transform, {20.5, 20.5});
    EXPECT_EQ(dst.pixel(static_cast<int>(c.x), static_cast<int>(c.y))[0], 200);
}

TEST(RotateRaster, NonFiniteAngle) {
    const ImageRef img = ImageRef::from_raster(Raster(2, 2), "r");
    EXPECT_THROW(rotate_image(img, NAN), Error);
}

TEST(RotateScene, MapsCentresAndOrientations) {
    const ImageRef img = ImageRef::from_scene(sample_scene(), "s");
    const RotatedImage r = rotate_image(img, 15);
    const SceneDescriptor& out = r.image.scene();
    EXPECT_EQ(out.canvas_w, rotated_canvas(640, 480, 15).width);
    const auto& in = img.scene().instances;
    for (std::size_t k = 0; k < in.size(); ++k) {
        EXPECT_EQ(out.instances[k].text, in[k].text);
        EXPECT_DOUBLE_EQ(out.instances[k].orientation, normalize_degrees(in[k].orientation + 15));
        const Point c = apply_transform(r.transform, in[k].center);
        EXPECT_EQ(out.instances[k].center, c);
    }
    EXPECT_DOUBLE_EQ(out.instances[2].orientation, 5.0);
}

TEST(RotateScene, ExactlyInvertible) {
    const ImageRef img = ImageRef::from_scene(sample_scene(), "s");
    for (double a : {15.0, 90.0, 137.25, 345.0}) {
        const RotatedImage fwd = rotate_image(img, a);
        const RotatedImage back = rotate_image(fwd.image, -a);
        const RotationTransform inv = invert_transform(fwd.transform);
        // Back-rotation re-expands the canvas, so centres return up to the
        // constant shift between the two canvases.
        const Point shift{(back.image.width() - img.width()) / 2.0, (back.image.height() - img.height()) / 2.0};
        for (std::size_t k = 0; k < img.scene().instances.size(); ++k) {
            const TextInstance& o = img.scene().instances[k];
            const TextInstance& f = fwd.image.scene().instances[k];
            const TextInstance& b = back.image.scene().instances[k];
            const Point c = apply_transform(inv, f.center);
            EXPECT_NEAR(c.x, o.center.x, 1e-9);
            EXPECT_NEAR(c.y, o.center.y, 1e-9);
            EXPECT_NEAR(fold_degrees(b.orientation - o.orientation), 0.0, 1e-9);
            EXPECT_NEAR(b.center.x - shift.x, o.center.x, 1e-9);
            EXPECT_NEAR(b.center.y - shift.y, o.center.y, 1e-9);
            EXPECT_EQ(b.box_w, o.box_w);
            EXPECT_EQ(b.box_h, o.box_h);
            EXPECT_EQ(b.text, o.text);
        }
    }
}

TEST(Scene, ValidationRejectsBadInstances) {
    SceneDescriptor s = sample_scene();
    s.instances[0].center = {700, 10};
    EXPECT_THROW(ImageRef::from_scene(s, "x"), Error);
    s = sample_scene();
    s.instances[1].text = "";
    EXPECT_THROW(ImageRef::from_scene(s, "x"), Error);
    s = sample_scene();
    s.instances[2].box_h = 0;
    EXPECT_THROW(ImageRef::from_scene(s, "x"), Error);
    s = sample_scene();
    s.instances[2].orientation = 360;
    EXPECT_THROW(ImageRef::from_scene(s, "x"), Error);
    s.instances.clear();
    EXPECT_NO_THROW(ImageRef::from_scene(s, "empty"));
}

TEST(Crop, FullCanvas) {
    const ImageRef img = ImageRef::from_raster(gradient(200, 100), "g");
    const ImageRef c = crop_and_resize(img, Quad::rect(0, 0, 200, 100), 250, 140);
    EXPECT_EQ(c.width(), 250);
    EXPECT_EQ(c.height(), 140);
    EXPECT_LT(c.raster().pixel(0, 0)[0], c.raster().pixel(249, 0)[0]);
}

TEST(Crop, ExactRegionIsPixelIdentical) {
    const Raster src = random_raster(400, 300, 8);
    const ImageRef c = crop_and_resize(ImageRef::from_raster(src, "r"), Quad::rect(30, 60, 280, 200), 250, 140);
    for (int y = 0; y < 140; ++y) {
        for (int x = 0; x < 250; ++x) {
            for (int ch = 0; ch < 3; ++ch) ASSERT_EQ(c.raster().pixel(x, y)[ch], src.pixel(30 + x, 60 + y)[ch]);
        }
    }
}

TEST(Crop, GradientCornersMatchDirectBilinear) {
    const ImageRef img = ImageRef::from_raster(gradient(250, 250), "g");
    const ImageRef c = crop_and_resize(img, Quad::rect(50, 40, 150, 140), 250, 140);
    // A linear ramp interpolates to itself: value at output (u, v) is the
    // source coordinate of that sample.
    auto expect_corner = [&](int u, int v) {
        const double x = 50 + (u + 0.5) * 100.0 / 250 - 0.5;
        const double y = 40 + (v + 0.5) * 100.0 / 140 - 0.5;
        EXPECT_EQ(c.raster().pixel(u, v)[0], std::lround(x));
        EXPECT_EQ(c.raster().pixel(u, v)[1], std::lround(y));
    };
    expect_corner(0, 0);
    expect_corner(249, 0);
    expect_corner(0, 139);
    expect_corner(249, 139);
    const auto* tl = c.raster().pixel(0, 0);
    const auto* br = c.raster().pixel(249, 139);
    EXPECT_LT(tl[0], br[0]);
    EXPECT_LT(tl[1], br[1]);
}

TEST(Crop, OutsideCanvas) {
    const ImageRef img = ImageRef::from_raster(Raster(50, 50), "r");
    try {
        crop_and_resize(img, Quad::rect(60, 60, 90, 90), 10, 10);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptyCrop);
    }
    EXPECT_THROW(crop_and_resize(ImageRef::from_scene({}, "s"), Quad::rect(0, 0, 1, 1), 1, 1), Error);
}

TEST(Png, RoundTripIsBitExact) {
    const Raster src = random_raster(16, 16, 12);
    const fs::path p = temp_path("rt.png");
    save_png(src, p);
    EXPECT_EQ(load_png(p), src);
    const ImageRef loaded = load_image(p);
    EXPECT_EQ(loaded.id(), p.stem().string());
    fs::remove(p);
}

TEST(Png, LargeImageDimensions) {
    const fs::path p = temp_path("big.png");
    save_png(Raster(1920, 1080), p);
    const ImageRef img = load_image(p);
    EXPECT_EQ(img.width(), 1920);
    EXPECT_EQ(img.height(), 1080);
    fs::remove(p);
}

TEST(Png, MissingAndCorruptFiles) {
    try {
        load_png("/nonexistent/none.png");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
    const fs::path p = temp_path("junk.png");
    {
        std::FILE* f = std::fopen(p.c_str(), "wb");
        std::fputs("not a png", f);
        std::fclose(f);
    }
    EXPECT_THROW(load_png(p), Error);
    fs::remove(p);
}
