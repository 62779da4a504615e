// Command line front end for tubal: synthetic data generation, t-SVD
// truncation, compressive sensing sweeps and image inpainting.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tubal/errors.hpp"
#include "tubal/experiment.hpp"
#include "tubal/generators.hpp"
#include "tubal/image.hpp"
#include "tubal/io.hpp"
#include "tubal/metrics.hpp"
#include "tubal/objective.hpp"
#include "tubal/solvers.hpp"
#include "tubal/tsvd.hpp"

namespace {

using namespace tubal;

struct GenLowrankArgs {
    Index n1 = 20, n2 = 20, n3 = 10;
    Index rank = 1;
    std::uint64_t seed = 0;
    std::string out;
};

struct GenSensingArgs {
    Index n1 = 20, n2 = 20, n3 = 10;
    Index m = 0;
    double rate = 0.0;
    std::uint64_t seed = 0;
    std::string outdir;
};

struct GenImageArgs {
    Index size = 128;
    Index block = 0;
    std::uint64_t seed = 0;
    std::string out;
};

struct TsvdArgs {
    std::string input;
    Index rank = 0;
    std::string out;
    std::string report;
};

struct InpaintArgs {
    std::string image;
    Index box_w = 80, box_h = 80;
    Index rank = 0;
    double gamma = 1.0;
    Index max_iters = 500;
    double tol = 1e-6;
    std::string out;
    std::string trace;
};

int run_gen_lowrank(const GenLowrankArgs& a) {
    const Tensor3d x = gen_lowrank(a.n1, a.n2, a.n3, a.rank, a.seed);
    save_tensor(x, a.out);
    std::cout << "wrote " << a.out << " (" << dims_str(x.dims()) << ", tubal rank " << a.rank
              << ")\n";
    return 0;
}

int run_gen_sensing(const GenSensingArgs& a) {
    Index m = a.m;
    if (m == 0) {
        if (!(a.rate > 0.0 && a.rate <= 1.0))
            throw ArgumentError("either --m or --rate in (0,1] is required");
        m = static_cast<Index>(std::lround(a.rate * a.n1 * a.n2 * a.n3));
        if (m < 1) throw ArgumentError("sampling rate gives zero measurements");
    }
    const MeasurementOp op = gen_gaussian_op(m, {a.n1, a.n2, a.n3}, a.seed);
    save_measurement_op(op, a.outdir);
    std::cout << "wrote " << a.outdir << " (" << m << " Gaussian measurements of "
              << dims_str(op.dims) << ")\n";
    return 0;
}

int run_gen_image(const GenImageArgs& a, bool striped) {
    const Index block = a.block > 0 ? a.block : (striped ? 32 : 16);
    const ImageTensor img =
        striped ? make_striped_facade(a.size, block, a.seed) : make_checkerboard(a.size, block, a.seed);
    save_image(img, a.out);
    std::cout << "wrote " << a.out << " (" << img.provenance << ")\n";
    return 0;
}

int run_tsvd(const TsvdArgs& a) {
    const Tensor3d x = load_tensor(a.input);
    if (!a.report.empty()) {
        const RankReport report = tubal_rank(x);
        save_rank_report(report, a.report);
        std::cout << "tubal rank " << report.tubal_rank << " -> " << a.report << "\n";
    }
    if (a.rank > 0) {
        if (a.out.empty()) throw ArgumentError("--rank requires --out");
        const Tensor3d xr = stht(x, a.rank);
        save_tensor(xr, a.out);
        std::cout << "wrote rank-" << a.rank << " approximation to " << a.out << "\n";
    } else if (a.report.empty()) {
        const RankReport report = tubal_rank(x);
        std::cout << rank_report_json(report) << "\n";
    }
    return 0;
}

int run_cs(const std::string& spec_path) {
    const ExperimentSpec spec = load_experiment_spec(spec_path);
    const ExperimentResult result = run_experiment(spec);
    std::cout << "wrote " << result.summary_path << " (" << result.rows.size() << " runs)\n";
    if (!result.all_ok) {
        std::cerr << "error: at least one run diverged\n";
        return 3;
    }
    return 0;
}

int run_inpaint(const InpaintArgs& a) {
    const ImageTensor img = load_image(a.image);
    const Index rank = a.rank > 0
                           ? a.rank
                           : static_cast<Index>(tubal_rank(img.tensor, 1e-6).tubal_rank);
    const OccludedImage occ = occlude_center(img, a.box_w, a.box_h);
    const SeparableObjective obj = SeparableObjective::inpainting(occ.mask, occ.observed);

    SolverConfig cfg;
    cfg.rank = rank;
    cfg.gamma = a.gamma;
    cfg.max_iters = a.max_iters;
    cfg.tol = a.tol;
    cfg.variant = SolverVariant::istht;
    cfg.ground_truth = img.tensor;

    RunTrace trace;
    std::string status;
    try {
        trace = run_solver(obj, cfg);
        status = trace.status == SolveStatus::converged ? "converged" : "max_iters";
    } catch (const DivergenceError& e) {
        trace = e.trace;
        status = "diverged";
    }

    if (!a.trace.empty()) {
        save_trace_csv(trace, a.trace);
        save_trace_sidecar(trace, cfg, a.trace + ".json");
    }
    ImageTensor recovered;
    recovered.tensor = trace.final_iterate;
    recovered.provenance = img.provenance + " recovered";
    save_image(recovered, a.out);

    std::cout << "rank " << rank << ", " << trace.iterations << " iterations, " << status;
    if (const auto re = trace.final_rec_error()) std::cout << ", recovery error " << *re;
    std::cout << ", wrote " << a.out << "\n";
    return status == "diverged" ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low tubal rank tensor recovery toolkit"};
    app.require_subcommand(1);

    GenLowrankArgs gl;
    GenSensingArgs gs;
    GenImageArgs gboard, gstripe;
    TsvdArgs ts;
    std::string cs_spec;
    InpaintArgs ip;

    auto* gen = app.add_subcommand("gen", "Generate synthetic inputs");
    gen->require_subcommand(1);

    auto* lowrank = gen->add_subcommand("lowrank", "Random tensor of given tubal rank");
    lowrank->add_option("--n1", gl.n1)->check(CLI::PositiveNumber);
    lowrank->add_option("--n2", gl.n2)->check(CLI::PositiveNumber);
    lowrank->add_option("--n3", gl.n3)->check(CLI::PositiveNumber);
    lowrank->add_option("--rank", gl.rank)->check(CLI::PositiveNumber);
    lowrank->add_option("--seed", gl.seed);
    lowrank->add_option("--out", gl.out)->required();

    auto* sensing = gen->add_subcommand("sensing", "Random Gaussian measurement operator");
    sensing->add_option("--n1", gs.n1)->check(CLI::PositiveNumber);
    sensing->add_option("--n2", gs.n2)->check(CLI::PositiveNumber);
    sensing->add_option("--n3", gs.n3)->check(CLI::PositiveNumber);
    sensing->add_option("--m", gs.m, "Number of measurements");
    sensing->add_option("--rate", gs.rate, "Sampling rate, used when --m is absent");
    sensing->add_option("--seed", gs.seed);
    sensing->add_option("--outdir", gs.outdir)->required();

    auto* board = gen->add_subcommand("checkerboard", "Rank-2 RGB checkerboard image");
    board->add_option("--size", gboard.size)->check(CLI::PositiveNumber);
    board->add_option("--cell", gboard.block, "Cell side in pixels");
    board->add_option("--seed", gboard.seed);
    board->add_option("--out", gboard.out)->required();

    auto* stripe = gen->add_subcommand("striped", "Rank-3 RGB striped facade image");
    stripe->add_option("--size", gstripe.size)->check(CLI::PositiveNumber);
    stripe->add_option("--band", gstripe.block, "Band width in pixels");
    stripe->add_option("--seed", gstripe.seed);
    stripe->add_option("--out", gstripe.out)->required();

    auto* tsvd_cmd = app.add_subcommand("tsvd", "Tubal rank report and truncation");
    tsvd_cmd->add_option("--input", ts.input)->required();
    tsvd_cmd->add_option("--rank", ts.rank, "Truncation rank");
    tsvd_cmd->add_option("--out", ts.out, "Output tensor for --rank");
    tsvd_cmd->add_option("--report", ts.report, "Rank report JSON path");

    auto* cs = app.add_subcommand("cs-run", "Run a compressive sensing experiment spec");
    cs->add_option("--spec", cs_spec, "Experiment spec JSON")->required();

    auto* inpaint = app.add_subcommand("inpaint", "Recover a centrally occluded image");
    inpaint->add_option("--image", ip.image)->required();
    inpaint->add_option("--box-w", ip.box_w, "Occlusion width in rows")->check(CLI::NonNegativeNumber);
    inpaint->add_option("--box-h", ip.box_h, "Occlusion height in columns")->check(CLI::NonNegativeNumber);
    inpaint->add_option("--rank", ip.rank, "Target tubal rank, measured from the image when absent");
    inpaint->add_option("--gamma", ip.gamma, "Step size");
    inpaint->add_option("--max-iters", ip.max_iters)->check(CLI::PositiveNumber);
    inpaint->add_option("--tol", ip.tol, "Relative step stopping tolerance");
    inpaint->add_option("--out", ip.out)->required();
    inpaint->add_option("--trace", ip.trace, "Iteration trace CSV path");

    try {
        app.parse(argc, argv);
        if (lowrank->parsed()) return run_gen_lowrank(gl);
        if (sensing->parsed()) return run_gen_sensing(gs);
        if (board->parsed()) return run_gen_image(gboard, false);
        if (stripe->parsed()) return run_gen_image(gstripe, true);
        if (tsvd_cmd->parsed()) return run_tsvd(ts);
        if (cs->parsed()) return run_cs(cs_spec);
        if (inpaint->parsed()) return run_inpaint(ip);
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
