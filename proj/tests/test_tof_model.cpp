#include <tofir/tof_model.hpp>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace tofir;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFmod = 21e6;

TofIntrinsics unit_intrinsics(int w, int h, double f = 2.0)
{
    // Pixel pitch 1 so sensor coordinates equal pixel offsets from the center.
    return TofIntrinsics::centered(w, h, f, 1.0, kFmod);
}

RawTofFrame single_pixel(const Buckets& b)
{
    RawTofFrame raw(1, 1);
    raw(0, 0) = b;
    return raw;
}

double circular_difference(double a, double b)
{
    return std::remainder(a - b, 2.0 * kPi);
}

} // namespace

TEST(Demodulate, QuarterPhaseExample)
{
    const auto d = demodulate_pixel({2, 1, 0, 1});
    EXPECT_DOUBLE_EQ(d.phase, kPi / 2);
    EXPECT_DOUBLE_EQ(d.amplitude, 1.0);
    EXPECT_DOUBLE_EQ(d.offset, 1.0);

    const RangeFrame r = demodulate(single_pixel({2, 1, 0, 1}), unit_intrinsics(1, 1));
    ASSERT_TRUE(r(0, 0).valid);
    // c / (8 f_mod) at 21 MHz
    EXPECT_NEAR(r(0, 0).distance, 1.7844789166666666, 1e-12);
    EXPECT_NEAR(r(0, 0).distance, 1.7845, 5e-5);
}

TEST(Demodulate, ZeroPhaseExample)
{
    const RangeFrame r = demodulate(single_pixel({1, 2, 1, 0}), unit_intrinsics(1, 1));
    ASSERT_TRUE(r(0, 0).valid);
    EXPECT_EQ(r(0, 0).distance, 0.0);
    EXPECT_DOUBLE_EQ(r(0, 0).amplitude, 1.0);
    EXPECT_DOUBLE_EQ(r(0, 0).offset, 1.0);
}

TEST(Demodulate, AllQuadrantsMapIntoZeroTwoPi)
{
    for (int k = 0; k < 16; ++k) {
        const double phi = k * 2.0 * kPi / 16.0;
        const auto d = demodulate_pixel(synthesize_buckets(phi, 3.0, 10.0));
        EXPECT_GE(d.phase, 0.0);
        EXPECT_LT(d.phase, 2.0 * kPi);
        EXPECT_NEAR(circular_difference(d.phase, phi), 0.0, 1e-14);
    }
}

TEST(Demodulate, ZeroAmplitudeIsInvalidNotError)
{
    const RangeFrame r = demodulate(single_pixel({5, 7, 5, 7}), unit_intrinsics(1, 1));
    EXPECT_FALSE(r(0, 0).valid);
    EXPECT_EQ(r(0, 0).amplitude, 0.0);
    EXPECT_DOUBLE_EQ(r(0, 0).offset, 6.0);
}

TEST(Demodulate, DimensionMismatchThrows)
{
    EXPECT_THROW(demodulate(RawTofFrame(4, 4), unit_intrinsics(4, 5)), StructuralError);
}

TEST(Demodulate, ExposureLimitsMarkPixelsInvalid)
{
    RawTofFrame raw(3, 1);
    raw(0, 0) = synthesize_buckets(1.0, 0.5, 100.0);  // under-exposed
    raw(1, 0) = synthesize_buckets(1.0, 50.0, 100.0); // fine
    raw(2, 0) = synthesize_buckets(1.0, 50.0, 5000.0); // offset saturated
    const RangeFrame r = demodulate(raw, unit_intrinsics(3, 1), ExposureLimits{1.0, 3000.0, 3500.0});
    EXPECT_FALSE(r(0, 0).valid);
    EXPECT_TRUE(r(1, 0).valid);
    EXPECT_FALSE(r(2, 0).valid);
}

TEST(Demodulate, RoundTripRecoversPhaseAmplitudeOffset)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> amp(1e-2, 1e3), ratio(1.0, 20.0), phase(0.0, 2.0 * kPi);
    for (int i = 0; i < 20000; ++i) {
        const double a = amp(rng);
        const double b = a * ratio(rng);
        const double phi = phase(rng);
        const auto d = demodulate_pixel(synthesize_buckets(phi, a, b));
        // Phase error relative to the full 2pi scale.
        ASSERT_LE(std::abs(circular_difference(d.phase, phi)) / (2.0 * kPi), 1e-9);
        ASSERT_LE(std::abs(d.amplitude - a) / a, 1e-9);
        ASSERT_LE(std::abs(d.offset - b) / b, 1e-9);
    }
}

TEST(Demodulate, CommonOffsetShiftsOnlyTheOffset)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 100.0), shift(-5.0, 500.0);
    for (int i = 0; i < 1000; ++i) {
        const Buckets s{u(rng), u(rng), u(rng), u(rng)};
        const double c = shift(rng);
        const auto d0 = demodulate_pixel(s);
        const auto d1 = demodulate_pixel({s.a1 + c, s.a2 + c, s.a3 + c, s.a4 + c});
        EXPECT_NEAR(d1.amplitude, d0.amplitude, 1e-9 * (1.0 + d0.amplitude));
        EXPECT_NEAR(d1.offset, d0.offset + c, 1e-9 * (1.0 + std::abs(d0.offset + c)));
        // ... and the offset really does move: b is not invariant.
        if (std::abs(c) > 1e-6) {
            EXPECT_NE(d1.offset, d0.offset);
        }
    }
}

TEST(UnambiguousRange, Values)
{
    EXPECT_NEAR(unambiguous_range(21e6), 7.137915666666666, 1e-12);
    EXPECT_NEAR(unambiguous_range(21e6), 7.1379, 5e-5);
    EXPECT_NEAR(unambiguous_range(10.5e6), 14.275831333333333, 1e-12);
    EXPECT_DOUBLE_EQ(unambiguous_range(10.5e6), 2.0 * unambiguous_range(21e6));
}

TEST(UnambiguousRange, DecreasesWithFrequency)
{
    double prev = unambiguous_range(1e6);
    for (double f = 2e6; f < 1e9; f *= 1.7) {
        const double r = unambiguous_range(f);
        EXPECT_LT(r, prev);
        prev = r;
    }
}

TEST(UnambiguousRange, RejectsNonPositiveFrequency)
{
    EXPECT_THROW(unambiguous_range(0.0), ArgumentError);
    EXPECT_THROW(unambiguous_range(-21e6), ArgumentError);
}

TEST(UnambiguousRange, DistanceAndWrappedDistanceGiveIdenticalBuckets)
{
    const double range = unambiguous_range(kFmod);
    int checked = 0;
    for (int k = 1; k < 4000; ++k) {
        const double d = k * 0x1p-12; // 0 .. ~0.98 m on an exact binary grid
        const double wrapped = d + range;
        if (wrapped - range != d)
            continue; // d + range not exactly representable
        ++checked;
        const Buckets b0 = synthesize_buckets_for_distance(d, 40.0, 300.0, kFmod);
        const Buckets b1 = synthesize_buckets_for_distance(wrapped, 40.0, 300.0, kFmod);
        ASSERT_EQ(b0, b1) << "d = " << d;
    }
    EXPECT_GT(checked, 3000);
}

TEST(Undistort, IdentityWithoutCoefficients)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const double x = u(rng), y = u(rng);
        const auto p = undistort_pixel(x, y, 0.0, 0.0);
        EXPECT_EQ(p.x(), x);
        EXPECT_EQ(p.y(), y);
    }
}

TEST(Undistort, CenterIsFixed)
{
    const auto p = undistort_pixel(0.0, 0.0, 0.3, -0.2);
    EXPECT_EQ(p.x(), 0.0);
    EXPECT_EQ(p.y(), 0.0);
}

TEST(Undistort, CubicTermExample)
{
    const auto p = undistort_pixel(1.0, 0.0, 0.1, 0.0);
    EXPECT_DOUBLE_EQ(p.x(), 1.1);
    EXPECT_EQ(p.y(), 0.0);
}

TEST(Undistort, RadiusFollowsPolynomial)
{
    const double k1 = 0.07, k2 = -0.01;
    const auto p = undistort_pixel(0.3, -0.4, k1, k2); // r_d = 0.5
    const double rd = 0.5;
    EXPECT_NEAR(p.norm(), rd + k1 * rd * rd * rd + k2 * std::pow(rd, 5), 1e-15);
}

TEST(Undistort, CommutesWithRotation)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0), ang(0.0, 2.0 * kPi);
    for (int i = 0; i < 1000; ++i) {
        const Eigen::Vector2d p(u(rng), u(rng));
        const double k1 = 0.2 * u(rng), k2 = 0.05 * u(rng);
        const Eigen::Rotation2Dd rot(ang(rng));
        const Eigen::Vector2d a = rot * undistort_pixel(p.x(), p.y(), k1, k2);
        const Eigen::Vector2d q = rot * p;
        const Eigen::Vector2d b = undistort_pixel(q.x(), q.y(), k1, k2);
        EXPECT_NEAR((a - b).norm(), 0.0, 1e-14);
    }
}

TEST(Undistort, DistortInvertsUndistort)
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng), y = u(rng);
        const auto d = distort_pixel(x, y, 0.05, 0.01);
        ASSERT_TRUE(d);
        const auto back = undistort_pixel(d->x(), d->y(), 0.05, 0.01);
        EXPECT_NEAR(back.x(), x, 1e-14);
        EXPECT_NEAR(back.y(), y, 1e-14);
    }
}

TEST(Backproject, CenterPixelOnAxis)
{
    const TofIntrinsics intr = unit_intrinsics(3, 3);
    RangeFrame range(3, 3);
    range(1, 1) = {3.0, 10.0, 20.0, true};
    const PointCloud cloud = backproject(range, intr);
    ASSERT_EQ(cloud.points.size(), 9u);
    const CloudPoint& p = cloud.points[range.index(1, 1)];
    ASSERT_TRUE(p.valid);
    EXPECT_EQ(p.position.x(), 0.0);
    EXPECT_EQ(p.position.y(), 0.0);
    EXPECT_DOUBLE_EQ(p.position.z(), 3.0);
}

TEST(Backproject, FortyFiveDegreeExample)
{
    const TofIntrinsics intr = unit_intrinsics(9, 9, 2.0);
    // u = f = 2, v = 0, D = sqrt(2)
    const Eigen::Vector3d p = backproject_pixel(intr.cx + 2.0, intr.cy, std::sqrt(2.0), intr);
    EXPECT_NEAR(p.x(), 1.0, 1e-15);
    EXPECT_NEAR(p.y(), 0.0, 1e-15);
    EXPECT_NEAR(p.z(), 1.0, 1e-15);
}

TEST(Backproject, PointNormEqualsDistance)
{
    TofIntrinsics intr = TofIntrinsics::centered(64, 50, 8.8e-3, 100e-6, kFmod);
    intr.k1 = 0.05;
    intr.k2 = -0.01;
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> d(0.1, 7.0);
    RangeFrame range(64, 50);
    for (auto& p : range)
        p = {d(rng), 1.0, 1.0, true};
    const PointCloud cloud = backproject(range, intr);
    for (const auto& p : cloud.points) {
        ASSERT_TRUE(p.valid);
        const double D = range[p.pixel].distance;
        EXPECT_NEAR(p.position.norm(), D, 1e-9 * D);
    }
}

TEST(Backproject, InvalidPolicy)
{
    const TofIntrinsics intr = unit_intrinsics(2, 2);
    RangeFrame range(2, 2);
    range(0, 0) = {1.0, 1.0, 1.0, true};
    range(1, 1) = {2.0, 1.0, 1.0, true};

    const PointCloud grid = backproject(range, intr);
    ASSERT_EQ(grid.points.size(), 4u);
    EXPECT_FALSE(grid.points[1].valid);
    EXPECT_EQ(grid.points[1].pixel, 1u);

    const PointCloud dropped = backproject(range, intr, InvalidPointPolicy::drop);
    ASSERT_EQ(dropped.points.size(), 2u);
    EXPECT_EQ(dropped.points[0].pixel, 0u);
    EXPECT_EQ(dropped.points[1].pixel, 3u);
}

TEST(Backproject, ProjectInvertsBackproject)
{
    TofIntrinsics intr = TofIntrinsics::centered(64, 50, 8.8e-3, 100e-6, kFmod);
    intr.k1 = 0.1;
    for (double x : {0.5, 10.25, 31.0, 63.5})
        for (double y : {0.5, 24.75, 49.5}) {
            const auto px = project_to_tof(backproject_pixel(x, y, 2.5, intr), intr);
            ASSERT_TRUE(px);
            EXPECT_NEAR(px->x(), x, 1e-9);
            EXPECT_NEAR(px->y(), y, 1e-9);
        }
}

TEST(TofIntrinsics, Validation)
{
    TofIntrinsics intr = unit_intrinsics(4, 4);
    EXPECT_NO_THROW(intr.validate());
    intr.cx = 5.0;
    EXPECT_THROW(intr.validate(), ConfigError);
    intr = unit_intrinsics(4, 4);
    intr.modulation_frequency = 0.0;
    EXPECT_THROW(intr.validate(), ConfigError);
    intr = unit_intrinsics(4, 4);
    intr.focal_length = -1.0;
    EXPECT_THROW(intr.validate(), ConfigError);
}
