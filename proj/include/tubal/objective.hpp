#ifndef TUBAL_OBJECTIVE_HPP
#define TUBAL_OBJECTIVE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tubal/errors.hpp"
#include "tubal/measurement.hpp"
#include "tubal/random.hpp"
#include "tubal/tensor.hpp"

namespace tubal {

/// Probabilities p(i) over the component functions of a separable objective.
struct SamplingDistribution {
    Eigen::VectorXd p;
    Eigen::VectorXd cum;  // inclusive prefix sums

    static SamplingDistribution uniform(Index m) {
        Eigen::VectorXd p = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
        return from(std::move(p));
    }

    static SamplingDistribution from(Eigen::VectorXd p) {
        if (p.size() < 1) throw ArgumentError("sampling distribution: empty");
        if ((p.array() <= 0.0).any())
            throw ArgumentError("sampling distribution: entries must be positive");
        if (std::abs(p.sum() - 1.0) > 1e-12)
            throw ArgumentError("sampling distribution: entries must sum to 1, got " +
                                std::to_string(p.sum()));
        SamplingDistribution d;
        d.p = std::move(p);
        d.cum.resize(d.p.size());
        double acc = 0.0;
        for (Index i = 0; i < d.p.size(); ++i) {
            acc += d.p(i);
            d.cum(i) = acc;
        }
        d.cum(d.p.size() - 1) = 1.0;
        return d;
    }

    bool is_uniform() const {
        return (p.array() == p(0)).all();
    }

    /// Inverse-CDF draw, deterministic given the engine state.
    Index sample(RngEngine& rng) const {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double u = unit(rng);
        const double* begin = cum.data();
        const double* end = begin + cum.size();
        return static_cast<Index>(std::upper_bound(begin, end, u) - begin);
    }
};

/// Separable objective F(X) = (1/M) * sum_{l=1..M} f_l(X) with
/// f_l(X) = 1/2 * || theta_l(X) - y_l ||^2 over the l-th block of
/// measurement rows.
///
/// Compressive sensing uses singleton blocks, so F(X) = (1/2M)||theta(X)-y||^2
/// with gradient (1/M) theta^*(theta(X)-y).  Inpainting uses a single block
/// by default, giving F(Y) = 1/2 ||P_Omega(X_obs - Y)||^2 with gradient
/// -P_Omega(X_obs - Y); more blocks can be requested to feed the stochastic
/// solvers, which scales F by 1/blocks accordingly.
class SeparableObjective {
public:
    static SeparableObjective compressive_sensing(MeasurementOp op, Eigen::VectorXd y) {
        const Index m = op.measurements();
        return SeparableObjective(std::move(op), std::move(y), m);
    }

    static SeparableObjective inpainting(MeasurementOp op, Eigen::VectorXd y,
                                         Index blocks = 1) {
        if (op.mode != MeasurementOp::Mode::mask_projection)
            throw ArgumentError("inpainting objective requires a mask-projection op");
        return SeparableObjective(std::move(op), std::move(y), blocks);
    }

    Index components() const { return components_; }
    Index measurements() const { return op_.measurements(); }
    Dims3 dims() const { return op_.dims; }
    const MeasurementOp& op() const { return op_; }
    const Eigen::VectorXd& y() const { return y_; }

    Eigen::VectorXd residual(const Tensor3d& x) const { return apply(op_, x) - y_; }

    double value_from_residual(const Eigen::VectorXd& r) const {
        return 0.5 * r.squaredNorm() / static_cast<double>(components_);
    }

    Tensor3d gradient_from_residual(const Eigen::VectorXd& r) const {
        Tensor3d g = adjoint(op_, r);
        g *= 1.0 / static_cast<double>(components_);
        return g;
    }

    double value(const Tensor3d& x) const { return value_from_residual(residual(x)); }

    Tensor3d gradient(const Tensor3d& x) const {
        return gradient_from_residual(residual(x));
    }

    double value_and_gradient(const Tensor3d& x, Tensor3d& grad) const {
        const Eigen::VectorXd r = residual(x);
        grad = gradient_from_residual(r);
        return value_from_residual(r);
    }

    /// Gradient of the single component f_l (no 1/M weight).
    Tensor3d component_gradient(Index l, const Tensor3d& x) const {
        check_component(l);
        const Index s = block_start_[l], len = block_start_[l + 1] - s;
        if (len == op_.measurements()) return adjoint(op_, residual(x));

        if (op_.mode == MeasurementOp::Mode::dense_sensing) {
            auto rows = op_.sensing.middleRows(s, len);
            const Eigen::VectorXd rb = rows * x.as_vec() - y_.segment(s, len);
            Tensor3d g(op_.dims[0], op_.dims[1], op_.dims[2]);
            g.as_vec() = rows.transpose() * rb;
            return g;
        }
        Tensor3d g(op_.dims[0], op_.dims[1], op_.dims[2]);
        const double* px = x.data();
        double* pg = g.data();
        for (Index t = s; t < s + len; ++t) {
            const Index idx = op_.omega[t];
            pg[idx] = px[idx] - y_(t);
        }
        return g;
    }

    /// (1/b) * sum over the listed components of their gradients.
    Tensor3d batch_mean_gradient(const std::vector<Index>& comps, const Tensor3d& x) const {
        if (comps.empty()) throw ArgumentError("batch gradient: empty batch");
        const double inv_b = 1.0 / static_cast<double>(comps.size());

        if (op_.mode == MeasurementOp::Mode::dense_sensing && components_ == measurements()) {
            // Singleton components: per-row dot and axpy on contiguous rows.
            Tensor3d g(op_.dims[0], op_.dims[1], op_.dims[2]);
            auto gv = g.as_vec();
            const auto xv = x.as_vec();
            for (Index l : comps) {
                check_component(l);
                const auto row = op_.sensing.row(l);
                gv += (row.dot(xv) - y_(l)) * row.transpose();
            }
            gv *= inv_b;
            return g;
        }

        Tensor3d g = component_gradient(comps.front(), x);
        for (std::size_t t = 1; t < comps.size(); ++t) g += component_gradient(comps[t], x);
        g *= inv_b;
        return g;
    }

    // Optional known constants, diagnostic metadata only.
    std::optional<double> rho_minus, rho_plus, delta;

private:
    SeparableObjective(MeasurementOp op, Eigen::VectorXd y, Index components)
        : op_(std::move(op)), y_(std::move(y)), components_(components) {
        const Index m = op_.measurements();
        if (y_.size() != m)
            throw ShapeError("objective: y has length " + std::to_string(y_.size()) +
                             ", op has M = " + std::to_string(m));
        if (components_ < 1 || components_ > m)
            throw ArgumentError("objective: component count " + std::to_string(components_) +
                                " out of range [1, " + std::to_string(m) + "]");
        block_start_.resize(components_ + 1);
        for (Index l = 0; l <= components_; ++l) block_start_[l] = l * m / components_;
    }

    void check_component(Index l) const {
        if (l < 0 || l >= components_)
            throw ArgumentError("objective: component index " + std::to_string(l) +
                                " out of range [0, " + std::to_string(components_) + ")");
    }

    MeasurementOp op_;
    Eigen::VectorXd y_;
    Index components_;
    std::vector<Index> block_start_;
};

/// y = theta(X*) + e with e i.i.d. Gaussian of standard deviation
/// sigma * max_i |theta(X*)_i|; sigma = 0 returns exact measurements.
inline Eigen::VectorXd noisy_observe(const MeasurementOp& op, const Tensor3d& x_star,
                                     double sigma, std::uint64_t seed) {
    if (sigma < 0.0) throw ArgumentError("noisy_observe: sigma must be nonnegative");
    Eigen::VectorXd y = apply(op, x_star);
    if (sigma > 0.0) {
        const double scale = y.cwiseAbs().maxCoeff();
        RngEngine rng(seed);
        y += gaussian_vector(y.size(), rng) * (sigma * scale);
    }
    return y;
}

}  // namespace tubal

#endif
