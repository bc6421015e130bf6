#include <tofir/calibration.hpp>
#include <tofir/simulator.hpp>

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace tofir;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct Rig {
    TofIntrinsics tof = default_tof_intrinsics();
    IrIntrinsics ir = default_ir_intrinsics();
    Extrinsics ext{rotation_from_axis_angle(Eigen::Vector3d(0.2, 1.0, 0.1).normalized() * 3.0 * kDeg),
                   Eigen::Vector3d(0.05, 0.0, 0.0)};
};

std::vector<TargetObservation> observations(const Rig& rig, std::size_t n, double sigma, std::uint64_t seed)
{
    const auto targets = sample_calibration_targets(n, rig.tof, rig.ir, rig.ext, 1.5, 4.0, seed);
    auto set = make_calibration_set(targets, rig.ext, rig.tof, rig.ir, sigma, seed + 1);
    return set.observations;
}

} // namespace

TEST(Rotation, AxisAngleMatchesEigen)
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const Eigen::Vector3d w = Eigen::Vector3d(n(rng), n(rng), n(rng)) * (i % 2 ? 1.0 : 1e-7);
        const Eigen::Matrix3d expected =
            w.norm() > 0 ? Eigen::AngleAxisd(w.norm(), w.normalized()).toRotationMatrix() : Eigen::Matrix3d::Identity();
        EXPECT_NEAR((rotation_from_axis_angle(w) - expected).norm(), 0.0, 1e-12);
    }
    EXPECT_EQ(rotation_from_axis_angle(Eigen::Vector3d::Zero()), Eigen::Matrix3d::Identity());
}

TEST(Rotation, OrthonormalizeProjectsToSO3)
{
    std::mt19937_64 rng(6);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const Eigen::Matrix3d r = rotation_from_axis_angle({n(rng), n(rng), n(rng)});
        Eigen::Matrix3d noisy = r;
        for (int k = 0; k < 9; ++k)
            noisy(k) += 1e-4 * n(rng);
        const Eigen::Matrix3d o = orthonormalize(noisy);
        EXPECT_NEAR((o.transpose() * o - Eigen::Matrix3d::Identity()).norm(), 0.0, 1e-12);
        EXPECT_NEAR(o.determinant(), 1.0, 1e-12);
        EXPECT_LT((o - r).norm(), 1e-3);
        EXPECT_NEAR((orthonormalize(r) - r).norm(), 0.0, 1e-12);
    }
}

TEST(Rotation, GeodesicDistance)
{
    const Eigen::Matrix3d a = rotation_from_axis_angle({0.1, 0.2, -0.3});
    const Eigen::Vector3d axis = Eigen::Vector3d(1, -2, 0.5).normalized();
    EXPECT_NEAR(geodesic_distance(a, a * rotation_from_axis_angle(axis * 0.25)), 0.25, 1e-12);
    EXPECT_NEAR(geodesic_distance(a, a), 0.0, 1e-7);
    EXPECT_NEAR(geodesic_distance(Eigen::Matrix3d::Identity(), rotation_from_axis_angle({0, 0, 3.0})), 3.0, 1e-12);
}

TEST(ProjectionError, ZeroForExactObservation)
{
    const Rig rig;
    for (const auto& o : observations(rig, 30, 0.0, 11))
        EXPECT_NEAR(projection_error(o, rig.ext.rotation(), rig.ext.translation(), rig.tof, rig.ir), 0.0, 1e-9);
}

TEST(ProjectionError, MatchesHandComputation)
{
    const TofIntrinsics tof = TofIntrinsics::centered(10, 10, 1.0, 1.0, 20e6);
    const IrIntrinsics ir = IrIntrinsics::centered(10, 10, 1.0, 1.0);
    // TOF center pixel at 2 m: point (0, 0, 2); shifted by T = (0.4, 0, 0)
    // it projects to u = 1 * 0.4 / 2 + 5 = 5.2.
    TargetObservation o{{5.0, 5.0}, 2.0, {5.0, 5.0}};
    const auto r = projection_residual(o, Eigen::Matrix3d::Identity(), {0.4, 0.0, 0.0}, tof, ir);
    EXPECT_NEAR(r.x(), 0.2, 1e-12);
    EXPECT_NEAR(r.y(), 0.0, 1e-12);
    EXPECT_NEAR(projection_error(o, Eigen::Matrix3d::Identity(), {0.4, 0.0, 0.0}, tof, ir), 0.2, 1e-12);
}

TEST(ProjectionError, BehindCameraIsPenalized)
{
    const TofIntrinsics tof = TofIntrinsics::centered(10, 10, 1.0, 1.0, 20e6);
    const IrIntrinsics ir = IrIntrinsics::centered(10, 10, 1.0, 1.0);
    TargetObservation o{{5.0, 5.0}, 2.0, {5.0, 5.0}};
    EXPECT_EQ(projection_error(o, Eigen::Matrix3d::Identity(), {0.0, 0.0, -3.0}, tof, ir), kBehindCameraPenalty);
}

TEST(EstimateRotation, RecoversExactRotation)
{
    const Rig rig;
    const auto obs = observations(rig, 20, 0.0, 21);
    const auto result = estimate_rotation(obs, rig.ext.translation(), rig.tof, rig.ir);
    EXPECT_TRUE(result.converged);
    EXPECT_LT(geodesic_distance(result.rotation, rig.ext.rotation()), 1e-8);
    EXPECT_LT(result.rms(), 1e-6);
    EXPECT_EQ(result.residuals.size(), obs.size());
}

TEST(EstimateRotation, ResultIsOrthonormal)
{
    const Rig rig;
    const auto obs = observations(rig, 25, 0.3, 31);
    const auto result = estimate_rotation(obs, rig.ext.translation(), rig.tof, rig.ir);
    EXPECT_NEAR((result.rotation.transpose() * result.rotation - Eigen::Matrix3d::Identity()).norm(), 0.0, 1e-9);
    EXPECT_NEAR(result.rotation.determinant(), 1.0, 1e-9);
}

TEST(EstimateRotation, NoisyObservationsStayClose)
{
    const Rig rig;
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        const auto obs = observations(rig, 20, 0.1, 100 * seed);
        const auto result = estimate_rotation(obs, rig.ext.translation(), rig.tof, rig.ir);
        EXPECT_TRUE(result.converged);
        // 0.1 px IR noise over ~20 targets: well below a twentieth of a degree.
        EXPECT_LT(geodesic_distance(result.rotation, rig.ext.rotation()), 0.05 * kDeg) << "seed " << seed;
        // Residuals cannot be worse than those of the true rotation.
        double truth_cost = 0.0, fit_cost = 0.0;
        for (std::size_t i = 0; i < obs.size(); ++i) {
            const double e = projection_error(obs[i], rig.ext.rotation(), rig.ext.translation(), rig.tof, rig.ir);
            truth_cost += e * e;
            fit_cost += result.residuals[i] * result.residuals[i];
        }
        EXPECT_LE(fit_cost, truth_cost * (1.0 + 1e-9));
    }
}

TEST(EstimateRotation, ConvergesFromLargerInitialError)
{
    Rig rig;
    rig.ext = Extrinsics(rotation_from_axis_angle(Eigen::Vector3d(1.0, -0.5, 0.3).normalized() * 10.0 * kDeg),
                         Eigen::Vector3d(0.05, 0.02, 0.0));
    const auto obs = observations(rig, 20, 0.0, 41);
    const auto result = estimate_rotation(obs, rig.ext.translation(), rig.tof, rig.ir);
    EXPECT_TRUE(result.converged);
    EXPECT_LT(geodesic_distance(result.rotation, rig.ext.rotation()), 1e-8);
}

TEST(EstimateRotation, RobustModeResistsOutlier)
{
    const Rig rig;
    auto obs = observations(rig, 20, 0.05, 51);
    obs[3].ir_pixel += Eigen::Vector2d(25.0, -15.0);

    const auto squared = estimate_rotation(obs, rig.ext.translation(), rig.tof, rig.ir);
    CalibrationOptions opt;
    opt.mode = CostMode::robust;
    const auto robust = estimate_rotation(obs, rig.ext.translation(), rig.tof, rig.ir, opt);
    EXPECT_TRUE(robust.converged);
    const double e_sq = geodesic_distance(squared.rotation, rig.ext.rotation());
    const double e_rb = geodesic_distance(robust.rotation, rig.ext.rotation());
    EXPECT_LT(e_rb, e_sq);
    // The robust optimum minimizes the unsquared sum.
    EXPECT_LE(robust.total_error, squared.total_error);
}

TEST(EstimateRotation, InitialRotationIsUsed)
{
    const Rig rig;
    const auto obs = observations(rig, 10, 0.0, 61);
    CalibrationOptions opt;
    opt.initial_rotation = rig.ext.rotation();
    const auto result = estimate_rotation(obs, rig.ext.translation(), rig.tof, rig.ir, opt);
    EXPECT_TRUE(result.converged);
    EXPECT_LE(result.iterations, 3);
    EXPECT_LT(geodesic_distance(result.rotation, rig.ext.rotation()), 1e-8);
}

TEST(EstimateRotation, TooFewObservations)
{
    const Rig rig;
    auto obs = observations(rig, 2, 0.0, 71);
    EXPECT_THROW(estimate_rotation(obs, rig.ext.translation(), rig.tof, rig.ir), InsufficientDataError);
    obs.clear();
    EXPECT_THROW(estimate_rotation(obs, rig.ext.translation(), rig.tof, rig.ir), InsufficientDataError);
}

TEST(EstimateRotation, CollinearObservationsAreRankDeficient)
{
    const Rig rig;
    std::vector<CalibrationTarget> targets;
    for (int i = 0; i < 8; ++i) {
        // All targets on one TOF image row.
        const double x = 16.0 + 4.0 * i;
        targets.push_back({backproject_pixel(x, 25.0, 2.0 + 0.1 * i, rig.tof)});
    }
    const auto set = make_calibration_set(targets, rig.ext, rig.tof, rig.ir, 0.0, 3);
    ASSERT_GE(set.observations.size(), 3u);
    EXPECT_THROW(estimate_rotation(set.observations, rig.ext.translation(), rig.tof, rig.ir), RankDeficiencyError);

    std::vector<TargetObservation> same(5, set.observations.front());
    EXPECT_THROW(estimate_rotation(same, rig.ext.translation(), rig.tof, rig.ir), RankDeficiencyError);
}

TEST(EstimateRotation, RejectsBadObservations)
{
    const Rig rig;
    auto obs = observations(rig, 5, 0.0, 81);
    auto bad = obs;
    bad[1].distance = -1.0;
    EXPECT_THROW(estimate_rotation(bad, rig.ext.translation(), rig.tof, rig.ir), ArgumentError);
    bad = obs;
    bad[2].tof_pixel.x() = 1e4;
    EXPECT_THROW(estimate_rotation(bad, rig.ext.translation(), rig.tof, rig.ir), ArgumentError);
    bad = obs;
    bad[0].ir_pixel.y() = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(estimate_rotation(bad, rig.ext.translation(), rig.tof, rig.ir), ArgumentError);
}

TEST(LocatePeak, SymmetricPeakIsExact)
{
    Grid<double> img(7, 7, 0.0);
    img(3, 3) = 10.0;
    for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}})
        img(3 + dx, 3 + dy) = 5.0;
    const auto p = locate_peak(img, 3, 3);
    EXPECT_TRUE(p.refined);
    EXPECT_DOUBLE_EQ(p.position.x(), 3.5);
    EXPECT_DOUBLE_EQ(p.position.y(), 3.5);
}

TEST(LocatePeak, SampledParabolaIsRecoveredExactly)
{
    // A separable quadratic is reproduced exactly by the fit.
    const double px = 10.3, py = 7.8;
    Grid<double> img(20, 15);
    for (int y = 0; y < 15; ++y)
        for (int x = 0; x < 20; ++x) {
            const double dx = x + 0.5 - px, dy = y + 0.5 - py;
            img(x, y) = 100.0 - 3.0 * dx * dx - 2.0 * dy * dy;
        }
    const auto [sx, sy] = find_peak_seed(img);
    EXPECT_EQ(sx, 10);
    EXPECT_EQ(sy, 7);
    const auto p = locate_peak(img, sx, sy);
    EXPECT_TRUE(p.refined);
    EXPECT_NEAR(p.position.x(), px, 1e-12);
    EXPECT_NEAR(p.position.y(), py, 1e-12);
}

TEST(LocatePeak, GaussianSpotSubPixel)
{
    std::mt19937_64 rng(91);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int i = 0; i < 200; ++i) {
        const Eigen::Vector2d c(20.0 + u(rng), 15.0 + u(rng));
        const Grid<double> img = render_gaussian_spot(40, 30, c, 1.5, 50.0, 300.0);
        const auto [sx, sy] = find_peak_seed(img);
        const auto p = locate_peak(img, sx, sy);
        EXPECT_TRUE(p.refined);
        EXPECT_LT((p.position - c).norm(), 0.05);
    }
}

TEST(LocatePeak, RejectsBorderAndFlatSeeds)
{
    Grid<double> img(5, 5, 1.0);
    img(0, 2) = 9.0;
    EXPECT_THROW(locate_peak(img, 0, 2), ArgumentError);
    EXPECT_THROW(locate_peak(img, 4, 4), ArgumentError);
    EXPECT_THROW(locate_peak(img, 7, 1), ArgumentError);
    // Plateau: not a strict maximum.
    EXPECT_THROW(locate_peak(img, 2, 2), ArgumentError);
    img(2, 2) = 5.0;
    img(3, 2) = 5.0;
    EXPECT_THROW(locate_peak(img, 2, 2), ArgumentError);
}

TEST(LocatePeak, NonConcaveFallsBackToSeed)
{
    // Strict maximum whose column means are convex: fit rejected, seed center returned.
    Grid<double> img(5, 5, 0.0);
    img(2, 2) = 3.0;
    for (int y = 1; y <= 3; ++y)
        img(1, y) = img(3, y) = 2.9;
    const auto p = locate_peak(img, 2, 2);
    EXPECT_FALSE(p.refined);
    EXPECT_EQ(p.position, Eigen::Vector2d(2.5, 2.5));
}
