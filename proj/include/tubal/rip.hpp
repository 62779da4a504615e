#ifndef TUBAL_RIP_HPP
#define TUBAL_RIP_HPP

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>

#include "tubal/errors.hpp"
#include "tubal/measurement.hpp"
#include "tubal/random.hpp"
#include "tubal/tensor.hpp"
#include "tubal/tprod.hpp"

// Monte-Carlo restricted-isometry diagnostics.  None of the solvers depend on
// these numbers; they exist to sanity-check measurement ensembles and to
// evaluate the contraction-factor formulas that predict solver behavior.

namespace tubal {

/// Estimated restricted-isometry constant for tubal-rank-r probes, plus the
/// derived contraction diagnostics when step size / noise data are supplied.
struct RipEstimate {
    int r = 0;
    double delta_hat = 0.0;  // max over trials of | ||theta~(X)||^2 - 1 |, unit probes
    int trials = 0;
    std::optional<double> kappa;   // contraction factor at a given step size
    std::optional<double> sigma;   // noise amplification at a given step size
    std::optional<double> alpha;   // worst-case component smoothness / (M p(i))
};

namespace detail {

inline Tensor3d random_rank_r_probe(const Dims3& d, Index r, RngEngine& rng) {
    Tensor3d x1 = gaussian_tensor(d[0], r, d[2], rng);
    Tensor3d x2 = gaussian_tensor(r, d[1], d[2], rng);
    Tensor3d x = tprod(x1, x2);
    const double n = fro_norm(x);
    x *= 1.0 / n;
    return x;
}

}  // namespace detail

/// Max deviation of ||theta(X)||^2 from 1 over random unit-norm tubal-rank-r
/// probes.  Dense sensing ensembles are rescaled by 1/sqrt(M) so that an
/// i.i.d. N(0,1) ensemble has expected squared output norm 1; mask ops are
/// tested as-is (the identity mask is an exact isometry).
inline RipEstimate estimate_rip(const MeasurementOp& op, Index r, int trials,
                                std::uint64_t seed) {
    if (trials < 1) throw ArgumentError("estimate_rip: trials must be >= 1");
    if (r < 1 || r > std::min(op.dims[0], op.dims[1]))
        throw ArgumentError("estimate_rip: rank " + std::to_string(r) +
                            " out of range for dims " + dims_str(op.dims));
    const double scale =
        op.mode == MeasurementOp::Mode::dense_sensing
            ? 1.0 / static_cast<double>(op.measurements())
            : 1.0;

    RngEngine rng(seed);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const Tensor3d x = detail::random_rank_r_probe(op.dims, r, rng);
        const double e = apply(op, x).squaredNorm() * scale;
        worst = std::max(worst, std::abs(e - 1.0));
    }

    RipEstimate est;
    est.r = static_cast<int>(r);
    est.delta_hat = worst;
    est.trials = trials;
    return est;
}

/// Contraction factor 2*(|1 - gamma| + gamma*delta) of the fixed-step
/// deterministic iteration under a rank-3r isometry constant delta.
inline double kappa_istht(double gamma, double delta) {
    return 2.0 * (std::abs(1.0 - gamma) + gamma * delta);
}

/// Noise amplification 2*gamma*eps*sqrt(1 + delta) entering the recovery
/// bound kappa^t * ||R^0|| + sigma / (1 - kappa).
inline double sigma_istht(double gamma, double delta, double eps) {
    return 2.0 * gamma * eps * std::sqrt(1.0 + delta);
}

/// Contraction factor 2*sqrt(1 - (2 - gamma*rho_plus) * gamma * rho_minus)
/// expressed through restricted strong convexity/smoothness constants.
inline double kappa_general(double gamma, double rho_minus, double rho_plus) {
    const double inside = 1.0 - (2.0 - gamma * rho_plus) * gamma * rho_minus;
    if (inside < 0.0 || inside > 1.0)
        throw ArgumentError("kappa_general: constants outside the admissible regime");
    return 2.0 * std::sqrt(inside);
}

/// Stochastic contraction factor 2*sqrt(1 - (2 - gamma*alpha) * gamma * rho_minus).
inline double kappa_stochastic(double gamma, double alpha, double rho_minus) {
    const double inside = 1.0 - (2.0 - gamma * alpha) * gamma * rho_minus;
    if (inside < 0.0 || inside > 1.0)
        throw ArgumentError("kappa_stochastic: constants outside the admissible regime");
    return 2.0 * std::sqrt(inside);
}

/// Monte-Carlo estimate of alpha_r = max_i rho_r^+(i) / (M p(i)) for a dense
/// ensemble with singleton components, where rho_r^+(i) is probed by the
/// quadratic form <A_i, X>^2 on unit-norm tubal-rank-r tensors.
inline double estimate_alpha(const MeasurementOp& op, const Eigen::VectorXd& p, Index r,
                             int trials, std::uint64_t seed) {
    if (op.mode != MeasurementOp::Mode::dense_sensing)
        throw ArgumentError("estimate_alpha: dense sensing op required");
    const Index m = op.measurements();
    if (p.size() != m) throw ShapeError("estimate_alpha: p has wrong length");
    if (trials < 1) throw ArgumentError("estimate_alpha: trials must be >= 1");

    RngEngine rng(seed);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const Tensor3d x = detail::random_rank_r_probe(op.dims, r, rng);
        const Eigen::VectorXd v = apply(op, x);
        for (Index i = 0; i < m; ++i)
            worst = std::max(worst, v(i) * v(i) / (static_cast<double>(m) * p(i)));
    }
    return worst;
}

}  // namespace tubal

#endif
