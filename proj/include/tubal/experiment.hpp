#ifndef TUBAL_EXPERIMENT_HPP
#define TUBAL_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tubal/solvers.hpp"
#include "tubal/tensor.hpp"

// Config-driven experiment runner.  A spec describes either a compressive
// sensing sweep (rank x sampling rate x noise level x batch size x seed, each
// point solved by every configured solver) or an inpainting study (synthetic
// or file image, centered occlusion box, one run per seed and solver).  Each
// run writes a trace CSV; the whole experiment writes summary.csv.

namespace tubal {

struct SolverSpec {
    SolverVariant variant = SolverVariant::istht;
    double gamma = 1.0;
    Index max_iters = 500;
    double tol = 1e-6;
    AisthtMode aistht_mode = AisthtMode::nesterov;
    Index batch_size = 0;   // bstoistht; overridden by the batch sweep axis
    Index trace_stride = 1;
};

struct ExperimentSpec {
    enum class Kind { cs_sweep, inpaint };

    Kind kind = Kind::cs_sweep;
    std::vector<SolverSpec> solvers;
    std::vector<std::uint64_t> seeds;
    std::string outdir;

    // cs_sweep axes
    Dims3 dims{20, 20, 10};
    std::vector<Index> ranks;
    std::vector<double> rates;     // sampling rates M / (n1*n2*n3), in (0,1]
    std::vector<double> sigmas;    // noise levels; empty means {0}
    std::vector<Index> batches;    // batch-size axis for bstoistht solvers

    // inpaint settings
    std::string image = "checkerboard";  // "checkerboard", "striped", or a .ppm path
    Index image_size = 128;
    Index cell = 16;
    Index band = 32;
    Index box_w = 80, box_h = 80;
    std::optional<Index> inpaint_rank;   // measured at rel_tol 1e-6 when unset
    Index inpaint_blocks = 1;
};

struct SummaryRow {
    std::string kind;
    Index rank = 0;
    double rate = 0.0;
    double sigma = 0.0;
    Index batch = 0;
    std::string solver;
    std::uint64_t seed = 0;
    std::string status;                  // converged | max_iters | diverged
    Index iterations = 0;
    double final_objective = 0.0;
    std::optional<double> final_re;
    std::optional<Index> iters_to_1e2;   // first iteration with RE <= 1e-2
    std::optional<Index> iters_to_1e4;
    double wall_ms = 0.0;
};

struct ExperimentResult {
    std::vector<SummaryRow> rows;
    bool all_ok = true;   // false iff some run diverged
    std::string summary_path;
};

ExperimentSpec parse_experiment_spec(const std::string& json_text);
ExperimentSpec load_experiment_spec(const std::string& path);

ExperimentResult run_experiment(const ExperimentSpec& spec);

std::string summary_csv_text(const std::vector<SummaryRow>& rows);

}  // namespace tubal

#endif
