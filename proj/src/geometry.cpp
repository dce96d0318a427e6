#include "rotocr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rotocr/error.hpp"

namespace rotocr {

namespace {

constexpr double kMinQuadArea = 1e-9;

double cross(Point o, Point a, Point b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double norm(Point p) { return std::hypot(p.x, p.y); }

// Quarter turn index if `degrees` is an exact multiple of 90, else -1.
int quarter_turns(double degrees) {
    const double n = normalize_degrees(degrees);
    if (n == 0.0) return 0;
    if (n == 90.0) return 1;
    if (n == 180.0) return 2;
    if (n == 270.0) return 3;
    return -1;
}

}  // namespace

bool is_finite(Point p) noexcept { return std::isfinite(p.x) && std::isfinite(p.y); }

double normalize_degrees(double degrees) noexcept {
    double r = std::fmod(degrees, 360.0);
    if (r < 0.0) r += 360.0;
    // fmod of a tiny negative value can round up to exactly 360
    if (r >= 360.0) r = 0.0;
    return r;
}

double fold_degrees(double degrees) noexcept {
    const double n = normalize_degrees(degrees);
    return n > 180.0 ? n - 360.0 : n;
}

double cos_deg(double degrees) noexcept {
    switch (quarter_turns(degrees)) {
        case 0: return 1.0;
        case 1: return 0.0;
        case 2: return -1.0;
        case 3: return 0.0;
        default: break;
    }
    return std::cos(normalize_degrees(degrees) * std::numbers::pi / 180.0);
}

double sin_deg(double degrees) noexcept {
    switch (quarter_turns(degrees)) {
        case 0: return 0.0;
        case 1: return 1.0;
        case 2: return 0.0;
        case 3: return -1.0;
        default: break;
    }
    return std::sin(normalize_degrees(degrees) * std::numbers::pi / 180.0);
}

double signed_area(std::span<const Point> polygon) noexcept {
    const std::size_t n = polygon.size();
    if (n < 3) return 0.0;
    const Point o = polygon[0];
    double twice = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double ax = polygon[i].x - o.x, ay = polygon[i].y - o.y;
        const double bx = polygon[i + 1].x - o.x, by = polygon[i + 1].y - o.y;
        twice += ax * by - bx * ay;
    }
    return 0.5 * twice;
}

Quad::Quad(const std::array<Point, 4>& vertices) : vertices_(vertices) {
    for (const Point& p : vertices_) {
        if (!is_finite(p)) throw Error(ErrorKind::InvalidInput, "quad vertex is not finite");
    }
    const double a = signed_area(vertices_);
    if (std::abs(a) < kMinQuadArea) {
        throw Error(ErrorKind::DegenerateQuad, "quad area below 1e-9 px^2");
    }
    if (a < 0.0) std::swap(vertices_[1], vertices_[3]);

    for (std::size_t i = 0; i < 4; ++i) {
        const Point& prev = vertices_[(i + 3) % 4];
        const Point& cur = vertices_[i];
        const Point& next = vertices_[(i + 1) % 4];
        const double turn = cross(prev, cur, next);
        const double scale = norm(cur - prev) * norm(next - cur);
        if (turn < -1e-12 * scale) {
            throw Error(ErrorKind::InvalidInput, "quad is not convex or self-intersects");
        }
    }
}

Quad Quad::rect(double x0, double y0, double x1, double y1) {
    return Quad({Point{x0, y0}, Point{x1, y0}, Point{x1, y1}, Point{x0, y1}});
}

Quad Quad::oriented_rect(Point center, double w, double h, double degrees) {
    const double c = cos_deg(degrees);
    const double s = sin_deg(degrees);
    const double hw = 0.5 * w;
    const double hh = 0.5 * h;
    const std::array<Point, 4> local{Point{-hw, -hh}, Point{hw, -hh}, Point{hw, hh}, Point{-hw, hh}};
    std::array<Point, 4> out{};
    for (std::size_t i = 0; i < 4; ++i) {
        out[i] = {center.x + c * local[i].x - s * local[i].y,
                  center.y + s * local[i].x + c * local[i].y};
    }
    return Quad(out);
}

double Quad::area() const noexcept { return signed_area(vertices_); }

RotationTransform::RotationTransform(double angle_degrees, Point pivot, Point output_offset)
    : angle_(normalize_degrees(angle_degrees)), pivot_(pivot), offset_(output_offset) {
    if (!std::isfinite(angle_degrees) || !is_finite(pivot) || !is_finite(output_offset)) {
        throw Error(ErrorKind::InvalidInput, "rotation transform parameters must be finite");
    }
}

bool RotationTransform::is_identity() const noexcept {
    return angle_ == 0.0 && offset_.x == 0.0 && offset_.y == 0.0;
}

Point apply_transform(const RotationTransform& t, Point p) {
    if (!is_finite(p)) throw Error(ErrorKind::InvalidInput, "point is not finite");
    if (t.is_identity()) return p;
    const double c = cos_deg(t.angle());
    const double s = sin_deg(t.angle());
    const Point d = p - t.pivot();
    return {t.pivot().x + (c * d.x - s * d.y) + t.output_offset().x,
            t.pivot().y + (s * d.x + c * d.y) + t.output_offset().y};
}

RotationTransform invert_transform(const RotationTransform& t) {
    if (t.is_identity()) return t;
    // p = pivot + M(-a) * (p' - (pivot + offset)), written in the same
    // pivot/offset form.
    return RotationTransform(-t.angle(), t.pivot() + t.output_offset(),
                             Point{-t.output_offset().x, -t.output_offset().y});
}

Quad transform_quad(const RotationTransform& t, const Quad& q) {
    std::array<Point, 4> out{};
    for (std::size_t i = 0; i < 4; ++i) out[i] = apply_transform(t, q[i]);
    return Quad(out);
}

std::vector<Point> clip_convex(std::span<const Point> subject, std::span<const Point> clip) {
    std::vector<Point> output(subject.begin(), subject.end());
    const std::size_t n = clip.size();
    for (std::size_t e = 0; e < n && !output.empty(); ++e) {
        const Point a = clip[e];
        const Point b = clip[(e + 1) % n];
        const std::vector<Point> input = std::move(output);
        output.clear();
        for (std::size_t i = 0; i < input.size(); ++i) {
            const Point cur = input[i];
            const Point prev = input[(i + input.size() - 1) % input.size()];
            const double dc = cross(a, b, cur);
            const double dp = cross(a, b, prev);
            const bool cur_in = dc >= 0.0;
            const bool prev_in = dp >= 0.0;
            if (cur_in != prev_in) {
                const double tpar = dp / (dp - dc);
                output.push_back({prev.x + tpar * (cur.x - prev.x), prev.y + tpar * (cur.y - prev.y)});
            }
            if (cur_in) output.push_back(cur);
        }
    }
    return output;
}

double polygon_intersection_area(const Quad& a, const Quad& b) {
    const auto clipped = clip_convex(a.vertices(), b.vertices());
    const double area = std::abs(signed_area(clipped));
    return std::min(area, std::min(a.area(), b.area()));
}

double iou(const Quad& a, const Quad& b) {
    if (a == b) return 1.0;
    const double inter = polygon_intersection_area(a, b);
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace rotocr
