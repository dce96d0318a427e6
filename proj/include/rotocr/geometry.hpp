#pragma once

#include <array>
#include <span>
#include <vector>

namespace rotocr {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }

bool is_finite(Point p) noexcept;

/// cos/sin of an angle in degrees. Multiples of 90 degrees return exact
/// 0/+-1 so quarter turns stay lossless.
double cos_deg(double degrees) noexcept;
double sin_deg(double degrees) noexcept;

/// Maps an angle to [0, 360).
double normalize_degrees(double degrees) noexcept;

/// Maps an angle to (-180, 180].
double fold_degrees(double degrees) noexcept;

/// Signed shoelace area; positive for counter-clockwise vertex order.
double signed_area(std::span<const Point> polygon) noexcept;

/// Convex quadrilateral with counter-clockwise vertices and positive area.
///
/// The constructor accepts either winding and normalizes it; it throws
/// Error(DegenerateQuad) for area below 1e-9 px^2 and Error(InvalidInput)
/// for non-finite, self-intersecting or non-convex input.
class Quad {
public:
    explicit Quad(const std::array<Point, 4>& vertices);

    /// Axis-aligned rectangle [x0, x1] x [y0, y1].
    static Quad rect(double x0, double y0, double x1, double y1);

    /// Rectangle of size w x h centred on `center`, rotated by `degrees` CCW.
    static Quad oriented_rect(Point center, double w, double h, double degrees);

    const std::array<Point, 4>& vertices() const noexcept { return vertices_; }
    const Point& operator[](std::size_t i) const noexcept { return vertices_[i]; }

    double area() const noexcept;

    friend bool operator==(const Quad&, const Quad&) = default;

private:
    std::array<Point, 4> vertices_;
};

/// Rotation about a pivot followed by a translation:
///   p' = pivot + M(angle) * (p - pivot) + output_offset
/// with M the standard counter-clockwise rotation matrix. Angles are kept in
/// [0, 360).
class RotationTransform {
public:
    RotationTransform() = default;
    RotationTransform(double angle_degrees, Point pivot, Point output_offset);

    static RotationTransform identity() { return {}; }

    double angle() const noexcept { return angle_; }
    Point pivot() const noexcept { return pivot_; }
    Point output_offset() const noexcept { return offset_; }

    bool is_identity() const noexcept;

    friend bool operator==(const RotationTransform&, const RotationTransform&) = default;

private:
    double angle_ = 0.0;
    Point pivot_{};
    Point offset_{};
};

Point apply_transform(const RotationTransform& t, Point p);
RotationTransform invert_transform(const RotationTransform& t);
Quad transform_quad(const RotationTransform& t, const Quad& q);

/// Sutherland-Hodgman clip of `subject` against the convex CCW polygon
/// `clip`.
std::vector<Point> clip_convex(std::span<const Point> subject, std::span<const Point> clip);

double polygon_intersection_area(const Quad& a, const Quad& b);
double iou(const Quad& a, const Quad& b);

}  // namespace rotocr
