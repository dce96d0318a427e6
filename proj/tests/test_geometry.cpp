#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rotocr/error.hpp"
#include "rotocr/geometry.hpp"

using namespace rotocr;

namespace {

bool same_point_set(const Quad& a, const Quad& b, double tol) {
    for (const Point& p : a.vertices()) {
        bool hit = false;
        for (const Point& q : b.vertices()) {
            if (std::abs(p.x - q.x) < tol && std::abs(p.y - q.y) < tol) hit = true;
        }
        if (!hit) return false;
    }
    return true;
}

}  // namespace

TEST(Transform, QuarterTurn) {
    const Point p = apply_transform(RotationTransform(90, {0, 0}, {0, 0}), {10, 0});
    EXPECT_EQ(p.x, 0.0);
    EXPECT_EQ(p.y, 10.0);
}

TEST(Transform, ZeroAngleIsIdentity) {
    const Point p = apply_transform(RotationTransform(0, {41.5, -3}, {0, 0}), {3, 7});
    EXPECT_EQ(p, (Point{3, 7}));
}

TEST(Transform, FifteenDegrees) {
    // cos/sin 15 deg to 17 digits (mpmath, 50-digit precision)
    const Point p = apply_transform(RotationTransform(15, {0, 0}, {0, 0}), {1, 0});
    EXPECT_NEAR(p.x, 0.96592582628906829, 1e-15);
    EXPECT_NEAR(p.y, 0.25881904510252076, 1e-15);
}

TEST(Transform, NonFiniteRejected) {
    const RotationTransform t(30, {0, 0}, {0, 0});
    try {
        apply_transform(t, {NAN, 1});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
    }
    EXPECT_THROW(apply_transform(t, {1, INFINITY}), Error);
}

TEST(Transform, InverseOfQuarterTurn) {
    const RotationTransform t(90, {5, 5}, {2, -1});
    const RotationTransform inv = invert_transform(t);
    EXPECT_DOUBLE_EQ(inv.angle(), 270.0);
    const Point p{3, 9};
    const Point back = apply_transform(inv, apply_transform(t, p));
    EXPECT_NEAR(back.x, p.x, 1e-12);
    EXPECT_NEAR(back.y, p.y, 1e-12);
}

TEST(Transform, IdentityInvertsToItself) {
    EXPECT_EQ(invert_transform(RotationTransform::identity()), RotationTransform::identity());
    EXPECT_TRUE(invert_transform(RotationTransform::identity()).is_identity());
}

TEST(Transform, RandomRoundTrips) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ang(-720, 720), coord(-5000, 5000);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        const RotationTransform t(ang(rng), {coord(rng), coord(rng)}, {coord(rng), coord(rng)});
        const Point p{coord(rng), coord(rng)};
        const Point q = apply_transform(invert_transform(t), apply_transform(t, p));
        worst = std::max(worst, std::hypot(q.x - p.x, q.y - p.y));
    }
    EXPECT_LT(worst, 1e-9);
}

TEST(Transform, AnglesNormalized) {
    EXPECT_DOUBLE_EQ(RotationTransform(-90, {}, {}).angle(), 270.0);
    EXPECT_DOUBLE_EQ(RotationTransform(720, {}, {}).angle(), 0.0);
    EXPECT_DOUBLE_EQ(fold_degrees(270), -90.0);
    EXPECT_DOUBLE_EQ(fold_degrees(180), 180.0);
    EXPECT_DOUBLE_EQ(fold_degrees(-180), 180.0);
}

TEST(Quad, NormalizesClockwiseInput) {
    const Quad cw({Point{0, 0}, Point{0, 1}, Point{1, 1}, Point{1, 0}});
    EXPECT_GT(signed_area(cw.vertices()), 0.0);
    EXPECT_DOUBLE_EQ(cw.area(), 1.0);
}

TEST(Quad, RejectsDegenerateAndNonConvex) {
    try {
        Quad({Point{0, 0}, Point{1, 0}, Point{2, 0}, Point{3, 0}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegenerateQuad);
    }
    try {
        Quad({Point{0, 0}, Point{2, 0}, Point{0.5, 0.5}, Point{0, 2}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
    }
    // bow-tie
    EXPECT_THROW(Quad({Point{0, 0}, Point{1, 1}, Point{1, 0}, Point{0, 1}}), Error);
    EXPECT_THROW(Quad({Point{0, 0}, Point{NAN, 0}, Point{1, 1}, Point{0, 1}}), Error);
}

TEST(TransformQuad, IdentityKeepsSquare) {
    const Quad sq = Quad::rect(0, 0, 1, 1);
    EXPECT_EQ(transform_quad(RotationTransform::identity(), sq), sq);
}

TEST(TransformQuad, QuarterTurnAboutCentreIsSamePointSet) {
    const Quad sq = Quad::rect(0, 0, 1, 1);
    const Quad r = transform_quad(RotationTransform(90, {0.5, 0.5}, {0, 0}), sq);
    EXPECT_TRUE(same_point_set(sq, r, 1e-12));
    EXPECT_NE(r, sq);  // cyclically permuted
}

TEST(TransformQuad, RotationPreservesArea) {
    const Quad sq = Quad::rect(3, 4, 13, 14);
    const Quad r = transform_quad(RotationTransform(45, {0, 0}, {0, 0}), sq);
    EXPECT_NEAR(r.area(), sq.area(), 1e-9);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 200; ++i) {
        const Quad q(oracle::random_convex_quad(rng, 1000 * u(rng), 1000 * u(rng), 200 * u(rng) + 1));
        const Quad t = transform_quad(RotationTransform(360 * u(rng), {500, 500}, {30, 40}), q);
        EXPECT_NEAR(t.area() / q.area(), 1.0, 1e-9);
    }
}

TEST(Intersection, KnownCases) {
    const Quad a = Quad::rect(0, 0, 1, 1);
    EXPECT_DOUBLE_EQ(polygon_intersection_area(a, a), 1.0);
    EXPECT_DOUBLE_EQ(polygon_intersection_area(a, Quad::rect(5, 5, 6, 6)), 0.0);
    EXPECT_NEAR(polygon_intersection_area(a, Quad::rect(0.5, 0, 1.5, 1)), 0.5, 1e-12);
    // touching edge only
    EXPECT_NEAR(polygon_intersection_area(a, Quad::rect(1, 0, 2, 1)), 0.0, 1e-12);
    // containment
    EXPECT_NEAR(polygon_intersection_area(Quad::rect(0, 0, 4, 4), Quad::rect(1, 1, 2, 2)), 1.0, 1e-12);
}

TEST(Intersection, ShiftedSquareAgreesWithMonteCarlo) {
    const Quad a = Quad::rect(0, 0, 1, 1);
    const Quad b = Quad::rect(0.5, 0, 1.5, 1);
    const auto mc = oracle::monte_carlo_overlap(a.vertices(), b.vertices(), 3);
    EXPECT_NEAR(polygon_intersection_area(a, b), mc.intersection, 1e-3);
}

TEST(Iou, KnownCases) {
    const Quad a = Quad::rect(0, 0, 1, 1);
    EXPECT_EQ(iou(a, a), 1.0);
    EXPECT_EQ(iou(a, Quad::rect(3, 3, 4, 4)), 0.0);
    EXPECT_NEAR(iou(a, Quad::rect(0.5, 0, 1.5, 1)), 1.0 / 3.0, 1e-6);
}

TEST(Iou, SymmetricAndBounded) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 500; ++i) {
        const Quad a(oracle::random_convex_quad(rng, 50 * u(rng), 50 * u(rng), 30));
        const Quad b(oracle::random_convex_quad(rng, 50 * u(rng), 50 * u(rng), 30));
        const double ab = iou(a, b);
        EXPECT_NEAR(ab, iou(b, a), 1e-12);
        EXPECT_GE(ab, 0.0);
        EXPECT_LE(ab, 1.0);
        const double inter = polygon_intersection_area(a, b);
        EXPECT_LE(inter, std::min(a.area(), b.area()) + 1e-9);
        EXPECT_EQ(iou(a, a), 1.0);
    }
}

TEST(Iou, AgreesWithMonteCarloOnRandomPairs) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 10; ++i) {
        const auto a = oracle::random_convex_quad(rng, 10 * u(rng), 10 * u(rng), 10);
        const auto b = oracle::random_convex_quad(rng, 10 * u(rng), 10 * u(rng), 10);
        const auto mc = oracle::monte_carlo_overlap(a, b, 100 + i, 500);
        EXPECT_NEAR(iou(Quad(a), Quad(b)), mc.iou(), 3e-3);
    }
}

TEST(Clip, DisjointGivesEmpty) {
    const Quad a = Quad::rect(0, 0, 1, 1);
    const Quad b = Quad::rect(2, 2, 3, 3);
    EXPECT_TRUE(clip_convex(a.vertices(), b.vertices()).empty());
}
