#include <doctest.h>

#include <cmath>
#include <random>

#include "radar_slam/errors.hpp"
#include "radar_slam/motion.hpp"

#include "oracles.hpp"

using namespace radar_slam;

namespace {

/// The full prediction mean map as a plain vector function, for differencing.
Eigen::VectorXd f_mean(const Eigen::VectorXd& x, const ControlInput& u, double dt) {
    Eigen::VectorXd out = x;
    const double mid = x(2) + dt * u.psi / 2.0;
    out(0) += u.v * dt * std::cos(mid);
    out(1) += u.v * dt * std::sin(mid);
    out(2) += u.psi * dt;
    return out;
}

AugmentedState random_state(int n_landmarks, std::mt19937& gen) {
    std::uniform_real_distribution<double> pos(-10.0, 10.0);
    std::uniform_real_distribution<double> heading(-2.5, 2.5);
    AugmentedState state;
    state.set_pose({pos(gen), pos(gen), heading(gen)});
    for (int i = 0; i < n_landmarks; ++i) {
        state.append_landmark({pos(gen), pos(gen)}, Eigen::MatrixXd::Zero(2, state.dim()),
                              Eigen::Matrix2d::Identity());
    }
    return state;
}

}  // namespace

TEST_CASE("propagate_pose closed-form cases") {
    const Pose origin{0.0, 0.0, 0.0};

    const Pose still = propagate_pose(origin, {0.0, 0.0}, 0.16);
    CHECK(still.x == 0.0);
    CHECK(still.y == 0.0);
    CHECK(still.theta == 0.0);

    const Pose straight = propagate_pose(origin, {1.0, 0.0}, 1.0);
    CHECK(straight.x == doctest::Approx(1.0));
    CHECK(straight.y == doctest::Approx(0.0));
    CHECK(straight.theta == doctest::Approx(0.0));

    // Half-turn in one step: the midpoint heading puts all motion into y.
    const Pose turn = propagate_pose(origin, {1.0, M_PI}, 1.0);
    CHECK(turn.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(turn.y == doctest::Approx(1.0));
    CHECK(turn.theta == doctest::Approx(M_PI));
}

TEST_CASE("jacobian_f_x structure") {
    std::mt19937 gen(3);
    AugmentedState state = random_state(2, gen);

    SUBCASE("zero velocity gives the identity") {
        const Eigen::MatrixXd fx = jacobian_f_x(state, {0.0, 0.3}, 0.16);
        CHECK(fx.isApprox(Eigen::MatrixXd::Identity(7, 7)));
    }
    SUBCASE("landmark block is the identity") {
        const Eigen::MatrixXd fx = jacobian_f_x(state, {4.0, 0.3}, 0.16);
        CHECK(fx.rows() == 7);
        CHECK(fx.bottomRightCorner(4, 4) == Eigen::MatrixXd::Identity(4, 4));
        CHECK(fx.bottomLeftCorner(4, 3) == Eigen::MatrixXd::Zero(4, 3));
        CHECK(fx.topRightCorner(3, 4) == Eigen::MatrixXd::Zero(3, 4));
    }
}

TEST_CASE("jacobian_f_u structure") {
    std::mt19937 gen(4);
    AugmentedState state = random_state(1, gen);
    state.set_pose({1.0, 2.0, 0.0});

    const double dt = 0.16;
    const Eigen::MatrixXd fu = jacobian_f_u(state, {2.0, 0.0}, dt);
    REQUIRE(fu.rows() == 5);
    REQUIRE(fu.cols() == 2);
    CHECK(fu(0, 0) == doctest::Approx(dt));  // B = 1 at theta = 0
    CHECK(fu(1, 0) == doctest::Approx(0.0)); // A = 0
    CHECK(fu(2, 1) == doctest::Approx(dt));
    CHECK(fu.bottomRows(2) == Eigen::MatrixXd::Zero(2, 2));
}

TEST_CASE("motion Jacobians match central finite differences") {
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> vel(-5.0, 5.0);
    std::uniform_real_distribution<double> yaw(-1.0, 1.0);
    const double dt = 0.16;

    for (int trial = 0; trial < 120; ++trial) {
        AugmentedState state = random_state(trial % 3, gen);
        const ControlInput u{vel(gen), yaw(gen)};

        const Eigen::MatrixXd fx = jacobian_f_x(state, u, dt);
        const Eigen::MatrixXd fd_x = test_oracles::numeric_jacobian(
            [&](const Eigen::VectorXd& x) { return f_mean(x, u, dt); }, state.mean());
        CHECK(test_oracles::max_relative_error(fx, fd_x) < 1e-5);

        const Eigen::MatrixXd fu = jacobian_f_u(state, u, dt);
        Eigen::Vector2d u_vec(u.v, u.psi);
        const Eigen::MatrixXd fd_u = test_oracles::numeric_jacobian(
            [&](const Eigen::VectorXd& uv) {
                return f_mean(state.mean(), {uv(0), uv(1)}, dt);
            },
            u_vec);
        CHECK(test_oracles::max_relative_error(fu, fd_u) < 1e-5);
    }
}

TEST_CASE("predict keeps landmarks static and adds PSD noise") {
    std::mt19937 gen(6);
    std::normal_distribution<double> noise;
    AugmentedState state = random_state(3, gen);

    Eigen::Matrix3d q = Eigen::Vector3d(1.5e-3, 1.5e-3, 5e-5).asDiagonal();
    OdometryReading odo;
    odo.v_bar = 3.0 + noise(gen);
    odo.psi_bar = 0.2;
    odo.U = Eigen::Vector2d(4e-4, 2e-8).asDiagonal();

    const AugmentedState out = predict(state, odo, q, 0.16);
    CHECK(out.dim() == state.dim());
    for (int i = 0; i < 3; ++i) {
        CHECK(out.landmark(i) == state.landmark(i));  // exact
    }

    // What prediction adds on top of Fx P Fx^T must be PSD.
    const Eigen::MatrixXd fx = jacobian_f_x(state, {odo.v_bar, odo.psi_bar}, 0.16);
    const Eigen::MatrixXd added =
        out.covariance() - fx * state.covariance() * fx.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        ((added + added.transpose()) / 2.0).eval(), Eigen::EigenvaluesOnly);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-9);
}

TEST_CASE("predict with all-zero inputs is covariance-neutral") {
    std::mt19937 gen(8);
    AugmentedState state = random_state(2, gen);
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(7, 7) * 0.5;
    p(0, 3) = p(3, 0) = 0.1;
    state.set_covariance(p);

    OdometryReading odo;  // zero reading, zero U
    const AugmentedState out = predict(state, odo, Eigen::Matrix3d::Zero(), 0.16);
    CHECK(out.covariance().isApprox(state.covariance(), 1e-14));
    CHECK(out.mean().isApprox(state.mean(), 1e-14));
}

TEST_CASE("predict rejects a non-PSD covariance") {
    AugmentedState state;
    Eigen::Matrix3d bad = Eigen::Matrix3d::Identity();
    bad(2, 2) = -1.0;
    state.set_covariance(bad);
    OdometryReading odo;
    CHECK_THROWS_AS(predict(state, odo, Eigen::Matrix3d::Zero(), 0.16), NumericalStateError);
}
