#ifndef TUBAL_SOLVERS_HPP
#define TUBAL_SOLVERS_HPP

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tubal/errors.hpp"
#include "tubal/metrics.hpp"
#include "tubal/objective.hpp"
#include "tubal/random.hpp"
#include "tubal/tensor.hpp"
#include "tubal/tsvd.hpp"

// Iterative singular-tube hard-thresholding solvers.  All four variants share
// the same skeleton: from X^0 = 0, alternate a (full, accelerated, stochastic
// or mini-batch) gradient step on a separable objective with the projection
// onto tubal rank <= r, until the relative step drops below tol or the
// iteration budget runs out.

namespace tubal {

enum class SolverVariant { istht, aistht, stoistht, bstoistht };

// The accelerated variant's pseudocode admits two readings of its step-size
// schedule; both are implemented.  `nesterov` (default) takes gradient steps
// of fixed size gamma and uses the schedule value only to mix consecutive
// pre-threshold iterates; `literal` uses the schedule value for both roles,
// which makes the first gradient step vanish.
enum class AisthtMode { nesterov, literal };

struct SolverConfig {
    Index rank = 1;
    double gamma = 1.0;
    Index max_iters = 500;
    double tol = 1e-6;
    SolverVariant variant = SolverVariant::istht;
    Index batch_size = 0;                           // bstoistht only
    std::optional<SamplingDistribution> sampling;   // stoistht; uniform if unset
    std::uint64_t seed = 0;
    std::optional<Tensor3d> ground_truth;           // enables the recovery-error column
    AisthtMode aistht_mode = AisthtMode::nesterov;
    Index trace_stride = 1;                         // record every k-th iteration
};

// Momentum bookkeeping of the accelerated variant: lambda_0 = 1,
// lambda_{t+1} = (1 + sqrt(1 + 4 lambda_t^2)) / 2, and the mixing coefficient
// beta_{t+1} = (1 - lambda_t) / lambda_{t+1} <= 0.
struct NesterovState {
    double lambda = 1.0;

    double advance() {
        const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * lambda * lambda));
        const double beta = (1.0 - lambda) / next;
        lambda = next;
        return beta;
    }
};

struct TraceRecord {
    Index iter = 0;                   // 1-based count of completed updates
    double objective = 0.0;           // F at the new iterate
    std::optional<double> rec_error;  // ||X - X^t|| / ||X|| when ground truth given
    double rel_step = 0.0;            // ||X^t - X^{t-1}|| / ||X^{t-1}||
    double ms = 0.0;                  // wall-clock time of this update
};

enum class SolveStatus { converged, max_iters };

struct RunTrace {
    std::vector<TraceRecord> records;
    SolveStatus status = SolveStatus::max_iters;
    Tensor3d final_iterate;
    Index iterations = 0;
    // Component draws of the stochastic variants in draw order (batch_size
    // entries per iteration for the batched variant).
    std::vector<Index> drawn_indices;

    std::optional<Index> first_iter_at_or_below(double re_threshold) const {
        for (const auto& rec : records)
            if (rec.rec_error && *rec.rec_error <= re_threshold) return rec.iter;
        return std::nullopt;
    }

    double final_objective() const {
        return records.empty() ? std::numeric_limits<double>::quiet_NaN()
                               : records.back().objective;
    }

    std::optional<double> final_rec_error() const {
        return records.empty() ? std::nullopt : records.back().rec_error;
    }
};

// Thrown when the objective blows up or stops being finite; carries the
// trace of the finite prefix of the run.
class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& msg, RunTrace partial)
        : NumericalError(msg), trace(std::move(partial)) {}

    RunTrace trace;
};

/// Relative step ||next - prev|| / ||prev||, absolute ||next|| when prev = 0.
inline double relative_step(const Tensor3d& prev, const Tensor3d& next) {
    const double np = fro_norm(prev);
    const double step = fro_norm(next - prev);
    return np == 0.0 ? step : step / np;
}

/// Stopping rule of all solver variants.
inline bool check_stop(const Tensor3d& x_prev, const Tensor3d& x_next, double tol) {
    if (!(tol > 0.0)) throw ArgumentError("check_stop: tol must be positive");
    return relative_step(x_prev, x_next) < tol;
}

namespace detail {

inline void validate_solver_config(const SeparableObjective& obj, const SolverConfig& cfg) {
    const Dims3 d = obj.dims();
    const Index minmn = std::min(d[0], d[1]);
    if (cfg.rank < 1 || cfg.rank > minmn)
        throw ArgumentError("solver: rank " + std::to_string(cfg.rank) +
                            " out of range [1, " + std::to_string(minmn) + "]");
    if (cfg.gamma < 0.0 || !std::isfinite(cfg.gamma))
        throw ArgumentError("solver: step size must be finite and nonnegative");
    if (cfg.max_iters < 1) throw ArgumentError("solver: max_iters must be >= 1");
    if (!(cfg.tol > 0.0)) throw ArgumentError("solver: tol must be positive");
    if (cfg.trace_stride < 1) throw ArgumentError("solver: trace_stride must be >= 1");

    if (cfg.ground_truth) {
        if (cfg.ground_truth->dims() != d)
            throw ShapeError("solver: ground truth is " + dims_str(cfg.ground_truth->dims()) +
                             ", objective operates on " + dims_str(d));
        if (fro_norm(*cfg.ground_truth) == 0.0)
            throw ArgumentError("solver: ground truth has zero norm");
    }

    const Index m = obj.components();
    if (cfg.sampling && cfg.sampling->p.size() != m)
        throw ShapeError("solver: sampling distribution covers " +
                         std::to_string(cfg.sampling->p.size()) + " components, objective has " +
                         std::to_string(m));
    if (cfg.variant == SolverVariant::bstoistht) {
        if (cfg.batch_size < 1 || cfg.batch_size > m)
            throw ArgumentError("solver: batch size " + std::to_string(cfg.batch_size) +
                                " out of range [1, " + std::to_string(m) + "]");
        if (cfg.sampling && !cfg.sampling->is_uniform())
            throw ArgumentError("solver: the batched variant supports uniform sampling only");
    }
}

}  // namespace detail

inline RunTrace run_solver(const SeparableObjective& obj, const SolverConfig& cfg) {
    using clock = std::chrono::steady_clock;
    detail::validate_solver_config(obj, cfg);

    const Dims3 d = obj.dims();
    const Index m = obj.components();
    const SamplingDistribution dist =
        cfg.sampling ? *cfg.sampling : SamplingDistribution::uniform(m);
    RngEngine rng(cfg.seed);

    Tensor3d x(d[0], d[1], d[2]);
    Eigen::VectorXd resid = obj.residual(x);
    const double initial_objective = obj.value_from_residual(resid);
    const double guard =
        1e6 * (initial_objective > 0.0 ? initial_objective : 1.0);

    NesterovState momentum;
    Tensor3d zhat_prev = x;
    std::vector<Index> perm, batch;
    const bool full_batch =
        cfg.variant == SolverVariant::bstoistht && cfg.batch_size == m;

    RunTrace trace;
    trace.final_iterate = x;

    for (Index t = 0; t < cfg.max_iters; ++t) {
        const auto t0 = clock::now();

        Tensor3d z;
        switch (cfg.variant) {
            case SolverVariant::istht: {
                const Tensor3d g = obj.gradient_from_residual(resid);
                if (!g.allFinite())
                    throw DivergenceError("solver diverged: non-finite gradient at iteration " +
                                              std::to_string(t + 1),
                                          std::move(trace));
                z = x - g * cfg.gamma;
                break;
            }
            case SolverVariant::aistht: {
                const Tensor3d g = obj.gradient_from_residual(resid);
                if (!g.allFinite())
                    throw DivergenceError("solver diverged: non-finite gradient at iteration " +
                                              std::to_string(t + 1),
                                          std::move(trace));
                const double beta = momentum.advance();
                const double step = cfg.aistht_mode == AisthtMode::literal ? beta : cfg.gamma;
                Tensor3d zhat = x - g * step;
                z = zhat * (1.0 - beta) + zhat_prev * beta;
                zhat_prev = std::move(zhat);
                break;
            }
            case SolverVariant::stoistht: {
                const Index i = dist.sample(rng);
                trace.drawn_indices.push_back(i);
                const Tensor3d g = obj.component_gradient(i, x);
                if (!g.allFinite())
                    throw DivergenceError("solver diverged: non-finite gradient at iteration " +
                                              std::to_string(t + 1),
                                          std::move(trace));
                const double scale = cfg.gamma / (static_cast<double>(m) * dist.p(i));
                z = x - g * scale;
                break;
            }
            case SolverVariant::bstoistht: {
                Tensor3d g;
                if (full_batch) {
                    g = obj.gradient_from_residual(resid);
                } else {
                    if (perm.empty()) perm.resize(m);
                    std::iota(perm.begin(), perm.end(), Index(0));
                    batch.clear();
                    for (Index j = 0; j < cfg.batch_size; ++j) {
                        std::uniform_int_distribution<Index> pick(j, m - 1);
                        std::swap(perm[j], perm[pick(rng)]);
                        batch.push_back(perm[j]);
                        trace.drawn_indices.push_back(perm[j]);
                    }
                    g = obj.batch_mean_gradient(batch, x);
                }
                if (!g.allFinite())
                    throw DivergenceError("solver diverged: non-finite gradient at iteration " +
                                              std::to_string(t + 1),
                                          std::move(trace));
                z = x - g * cfg.gamma;
                break;
            }
        }

        Tensor3d x_next = stht(z, cfg.rank);
        const double rel = relative_step(x, x_next);

        resid = obj.residual(x_next);
        const double objective = obj.value_from_residual(resid);
        if (!std::isfinite(objective) || objective > guard)
            throw DivergenceError(
                "solver diverged: objective " + std::to_string(objective) + " at iteration " +
                    std::to_string(t + 1) + " (initial " + std::to_string(initial_objective) + ")",
                std::move(trace));

        const double ms =
            std::chrono::duration<double, std::milli>(clock::now() - t0).count();
        const bool converged = rel < cfg.tol;
        const bool last = converged || t + 1 == cfg.max_iters;

        if ((t + 1) % cfg.trace_stride == 0 || last) {
            TraceRecord rec;
            rec.iter = t + 1;
            rec.objective = objective;
            if (cfg.ground_truth) rec.rec_error = recovery_error(x_next, *cfg.ground_truth);
            rec.rel_step = rel;
            rec.ms = ms;
            trace.records.push_back(rec);
        }

        trace.iterations = t + 1;
        x = std::move(x_next);

        if (converged) {
            trace.status = SolveStatus::converged;
            break;
        }
    }

    trace.final_iterate = std::move(x);
    return trace;
}

inline RunTrace istht(const SeparableObjective& obj, SolverConfig cfg) {
    cfg.variant = SolverVariant::istht;
    return run_solver(obj, cfg);
}

inline RunTrace aistht(const SeparableObjective& obj, SolverConfig cfg) {
    cfg.variant = SolverVariant::aistht;
    return run_solver(obj, cfg);
}

inline RunTrace stoistht(const SeparableObjective& obj, SolverConfig cfg) {
    cfg.variant = SolverVariant::stoistht;
    return run_solver(obj, cfg);
}

inline RunTrace bstoistht(const SeparableObjective& obj, SolverConfig cfg) {
    cfg.variant = SolverVariant::bstoistht;
    return run_solver(obj, cfg);
}

}  // namespace tubal

#endif
