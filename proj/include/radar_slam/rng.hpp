#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>
#include <Eigen/Cholesky>

namespace radar_slam {

/// Deterministic random stream. Samplers are implemented by hand instead of
/// through std distributions, whose output sequences differ between standard
/// library implementations; golden-file replay needs bit-stable draws.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform() {
        // 53-bit mantissa from the top bits of one 64-bit draw.
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (fresh pair each call, second value
    /// discarded, so the consumed stream length per call is fixed).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Poisson by Knuth's product-of-uniforms; fine for the small means used here.
    int poisson(double mean) {
        if (mean <= 0.0) {
            return 0;
        }
        const double limit = std::exp(-mean);
        int n = -1;
        double product = 1.0;
        do {
            ++n;
            product *= uniform();
        } while (product > limit);
        return n;
    }

    /// Zero-mean multivariate normal draw with the given covariance.
    /// Accepts semi-definite inputs (zero noise is a legal configuration);
    /// the consumed stream length is fixed by the dimension.
    Eigen::VectorXd multivariate_normal(const Eigen::MatrixXd& cov) {
        Eigen::VectorXd z(cov.rows());
        for (int i = 0; i < z.size(); ++i) {
            z(i) = normal();
        }
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
        Eigen::VectorXd d = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
        return ldlt.transpositionsP().transpose() *
               (Eigen::MatrixXd(ldlt.matrixL()) * d.asDiagonal() * z);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace radar_slam
