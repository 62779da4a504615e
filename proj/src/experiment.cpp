#include "tubal/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "tubal/errors.hpp"
#include "tubal/generators.hpp"
#include "tubal/image.hpp"
#include "tubal/io.hpp"
#include "tubal/objective.hpp"
#include "tubal/solvers.hpp"
#include "tubal/tsvd.hpp"

namespace tubal {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string fmt_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

AisthtMode aistht_mode_from_name(const std::string& name) {
    if (name == "nesterov") return AisthtMode::nesterov;
    if (name == "literal") return AisthtMode::literal;
    throw ArgumentError("unknown aistht mode: " + name);
}

SolverSpec parse_solver_spec(const json& j) {
    SolverSpec s;
    s.variant = solver_variant_from_name(j.at("variant").get<std::string>());
    if (j.contains("gamma")) s.gamma = j.at("gamma").get<double>();
    if (j.contains("max_iters")) s.max_iters = j.at("max_iters").get<Index>();
    if (j.contains("tol")) s.tol = j.at("tol").get<double>();
    if (j.contains("aistht_mode"))
        s.aistht_mode = aistht_mode_from_name(j.at("aistht_mode").get<std::string>());
    if (j.contains("batch_size")) s.batch_size = j.at("batch_size").get<Index>();
    if (j.contains("trace_stride")) s.trace_stride = j.at("trace_stride").get<Index>();
    return s;
}

void validate_spec(const ExperimentSpec& spec) {
    if (spec.solvers.empty()) throw ArgumentError("experiment spec: no solvers configured");
    if (spec.seeds.empty()) throw ArgumentError("experiment spec: no seeds listed");
    if (spec.outdir.empty()) throw ArgumentError("experiment spec: outdir missing");

    if (spec.kind == ExperimentSpec::Kind::cs_sweep) {
        if (spec.ranks.empty()) throw ArgumentError("experiment spec: rank sweep is empty");
        if (spec.rates.empty()) throw ArgumentError("experiment spec: rate sweep is empty");
        const Index minmn = std::min(spec.dims[0], spec.dims[1]);
        for (Index r : spec.ranks)
            if (r < 1 || r > minmn)
                throw ArgumentError("experiment spec: rank " + std::to_string(r) +
                                    " out of range for dims " + dims_str(spec.dims));
        for (double rate : spec.rates)
            if (!(rate > 0.0 && rate <= 1.0))
                throw ArgumentError("experiment spec: sampling rate " + fmt_g(rate) +
                                    " outside (0,1]");
        for (double s : spec.sigmas)
            if (s < 0.0) throw ArgumentError("experiment spec: negative sigma");
        for (Index b : spec.batches)
            if (b < 1) throw ArgumentError("experiment spec: batch size must be >= 1");
    } else {
        if (spec.box_w < 0 || spec.box_h < 0)
            throw ArgumentError("experiment spec: negative occlusion box");
        if (spec.image != "checkerboard" && spec.image != "striped" &&
            !spec.image.ends_with(".ppm"))
            throw ArgumentError("experiment spec: image must be \"checkerboard\", \"striped\" "
                                "or a .ppm path, got \"" + spec.image + "\"");
    }
}

struct RunOutcome {
    RunTrace trace;
    std::string status;
    double wall_ms = 0.0;
};

// Runs one solver; divergence is recorded, not propagated.
RunOutcome run_one(const SeparableObjective& obj, const SolverConfig& cfg) {
    RunOutcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        out.trace = run_solver(obj, cfg);
        out.status = out.trace.status == SolveStatus::converged ? "converged" : "max_iters";
    } catch (const DivergenceError& e) {
        out.trace = e.trace;
        out.status = "diverged";
    }
    out.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    return out;
}

SummaryRow make_row(const ExperimentSpec& spec, const RunOutcome& outcome,
                    const SolverSpec& solver, std::uint64_t seed) {
    SummaryRow row;
    row.kind = spec.kind == ExperimentSpec::Kind::cs_sweep ? "cs_sweep" : "inpaint";
    row.solver = solver_variant_name(solver.variant);
    row.seed = seed;
    row.status = outcome.status;
    row.iterations = outcome.trace.iterations;
    row.final_objective = outcome.trace.final_objective();
    row.final_re = outcome.trace.final_rec_error();
    row.iters_to_1e2 = outcome.trace.first_iter_at_or_below(1e-2);
    row.iters_to_1e4 = outcome.trace.first_iter_at_or_below(1e-4);
    row.wall_ms = outcome.wall_ms;
    return row;
}

}  // namespace

ExperimentSpec parse_experiment_spec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("experiment spec: ") + e.what(), e.byte);
    }

    try {
        ExperimentSpec spec;
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "cs_sweep")
            spec.kind = ExperimentSpec::Kind::cs_sweep;
        else if (kind == "inpaint")
            spec.kind = ExperimentSpec::Kind::inpaint;
        else
            throw ArgumentError("experiment spec: unknown kind \"" + kind + "\"");

        spec.outdir = j.at("outdir").get<std::string>();
        for (const auto& s : j.at("seeds")) spec.seeds.push_back(s.get<std::uint64_t>());
        for (const auto& s : j.at("solvers")) spec.solvers.push_back(parse_solver_spec(s));

        if (spec.kind == ExperimentSpec::Kind::cs_sweep) {
            const auto& dims_j = j.at("dims");
            spec.dims = {dims_j.at(0).get<Index>(), dims_j.at(1).get<Index>(),
                         dims_j.at(2).get<Index>()};
            for (const auto& r : j.at("ranks")) spec.ranks.push_back(r.get<Index>());
            for (const auto& r : j.at("rates")) spec.rates.push_back(r.get<double>());
            if (j.contains("sigmas"))
                for (const auto& s : j.at("sigmas")) spec.sigmas.push_back(s.get<double>());
            if (j.contains("batches"))
                for (const auto& b : j.at("batches")) spec.batches.push_back(b.get<Index>());
        } else {
            if (j.contains("image")) spec.image = j.at("image").get<std::string>();
            if (j.contains("image_size")) spec.image_size = j.at("image_size").get<Index>();
            if (j.contains("cell")) spec.cell = j.at("cell").get<Index>();
            if (j.contains("band")) spec.band = j.at("band").get<Index>();
            if (j.contains("box")) {
                spec.box_w = j.at("box").at(0).get<Index>();
                spec.box_h = j.at("box").at(1).get<Index>();
            }
            if (j.contains("rank") && !j.at("rank").is_null())
                spec.inpaint_rank = j.at("rank").get<Index>();
            if (j.contains("blocks")) spec.inpaint_blocks = j.at("blocks").get<Index>();
        }

        validate_spec(spec);
        return spec;
    } catch (const json::exception& e) {
        throw ParseError(std::string("experiment spec: ") + e.what(), 0);
    }
}

ExperimentSpec load_experiment_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_experiment_spec(text.str());
}

std::string summary_csv_text(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    out << "kind,rank,rate,sigma,batch,solver,seed,status,iterations,final_objective,"
           "final_re,iters_to_1e2,iters_to_1e4,wall_ms\n";
    for (const auto& r : rows) {
        out << r.kind << ',' << r.rank << ',' << fmt_g(r.rate) << ',' << fmt_g(r.sigma) << ','
            << r.batch << ',' << r.solver << ',' << r.seed << ',' << r.status << ','
            << r.iterations << ',' << fmt_full(r.final_objective) << ',';
        if (r.final_re) out << fmt_full(*r.final_re);
        out << ',';
        if (r.iters_to_1e2) out << *r.iters_to_1e2;
        out << ',';
        if (r.iters_to_1e4) out << *r.iters_to_1e4;
        char ms[32];
        std::snprintf(ms, sizeof ms, "%.3f", r.wall_ms);
        out << ',' << ms << '\n';
    }
    return out.str();
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    validate_spec(spec);
    std::error_code ec;
    fs::create_directories(spec.outdir, ec);
    if (ec) throw IoError("cannot create output directory " + spec.outdir + ": " + ec.message());

    ExperimentResult result;

    if (spec.kind == ExperimentSpec::Kind::cs_sweep) {
        const Index n = dim_product(spec.dims);
        const std::vector<double> sigmas = spec.sigmas.empty()
                                               ? std::vector<double>{0.0}
                                               : spec.sigmas;
        const std::vector<Index> batches =
            spec.batches.empty() ? std::vector<Index>{0} : spec.batches;

        for (Index rank : spec.ranks)
            for (std::size_t ri = 0; ri < spec.rates.size(); ++ri)
                for (std::size_t si = 0; si < sigmas.size(); ++si)
                    for (std::size_t bi = 0; bi < batches.size(); ++bi) {
                        const double rate = spec.rates[ri];
                        const double sigma = sigmas[si];
                        const Index m = static_cast<Index>(std::lround(rate * n));
                        if (m < 1)
                            throw ArgumentError("experiment: sampling rate " + fmt_g(rate) +
                                                " gives zero measurements");
                        const std::uint64_t point =
                            ((static_cast<std::uint64_t>(rank) * 31 + ri) * 31 + si) * 31 + bi;

                        for (std::uint64_t seed : spec.seeds) {
                            const Tensor3d x_star =
                                gen_lowrank(spec.dims[0], spec.dims[1], spec.dims[2], rank,
                                            mix_seed(seed, point, 1));
                            const MeasurementOp op =
                                gen_gaussian_op(m, spec.dims, mix_seed(seed, point, 2));
                            const Eigen::VectorXd y =
                                noisy_observe(op, x_star, sigma, mix_seed(seed, point, 3));
                            const SeparableObjective obj =
                                SeparableObjective::compressive_sensing(op, y);

                            for (std::size_t vi = 0; vi < spec.solvers.size(); ++vi) {
                                const SolverSpec& s = spec.solvers[vi];
                                const bool batched = s.variant == SolverVariant::bstoistht;
                                if (!batched && bi > 0) continue;

                                SolverConfig cfg;
                                cfg.rank = rank;
                                cfg.gamma = s.gamma;
                                cfg.max_iters = s.max_iters;
                                cfg.tol = s.tol;
                                cfg.variant = s.variant;
                                cfg.aistht_mode = s.aistht_mode;
                                cfg.trace_stride = s.trace_stride;
                                cfg.batch_size =
                                    batched ? (batches[bi] > 0 ? batches[bi] : s.batch_size)
                                            : 0;
                                cfg.seed = mix_seed(seed, point, 100 + vi);
                                cfg.ground_truth = x_star;

                                const RunOutcome outcome = run_one(obj, cfg);
                                if (outcome.status == "diverged") result.all_ok = false;

                                SummaryRow row = make_row(spec, outcome, s, seed);
                                row.rank = rank;
                                row.rate = rate;
                                row.sigma = sigma;
                                row.batch = cfg.batch_size;
                                result.rows.push_back(row);

                                const std::string tag =
                                    "r" + std::to_string(rank) + "_rate" + fmt_g(rate) +
                                    "_sig" + fmt_g(sigma) + "_b" +
                                    std::to_string(cfg.batch_size) + "_seed" +
                                    std::to_string(seed) + "_" + row.solver;
                                save_trace_csv(outcome.trace,
                                               (fs::path(spec.outdir) / ("trace_" + tag + ".csv"))
                                                   .string());
                                save_trace_sidecar(
                                    outcome.trace, cfg,
                                    (fs::path(spec.outdir) / ("trace_" + tag + ".json")).string());
                            }
                        }
                    }
    } else {
        for (std::uint64_t seed : spec.seeds) {
            ImageTensor img;
            if (spec.image == "checkerboard")
                img = make_checkerboard(spec.image_size, spec.cell, seed);
            else if (spec.image == "striped")
                img = make_striped_facade(spec.image_size, spec.band, seed);
            else
                img = load_image(spec.image);

            const Index rank = spec.inpaint_rank
                                   ? *spec.inpaint_rank
                                   : static_cast<Index>(tubal_rank(img.tensor, 1e-6).tubal_rank);
            const OccludedImage occ = occlude_center(img, spec.box_w, spec.box_h);
            const SeparableObjective obj =
                SeparableObjective::inpainting(occ.mask, occ.observed, spec.inpaint_blocks);

            for (std::size_t vi = 0; vi < spec.solvers.size(); ++vi) {
                const SolverSpec& s = spec.solvers[vi];
                SolverConfig cfg;
                cfg.rank = rank;
                cfg.gamma = s.gamma;
                cfg.max_iters = s.max_iters;
                cfg.tol = s.tol;
                cfg.variant = s.variant;
                cfg.aistht_mode = s.aistht_mode;
                cfg.trace_stride = s.trace_stride;
                cfg.batch_size = s.variant == SolverVariant::bstoistht
                                     ? (s.batch_size > 0 ? s.batch_size : spec.inpaint_blocks)
                                     : 0;
                cfg.seed = mix_seed(seed, 0, 100 + vi);
                cfg.ground_truth = img.tensor;

                const RunOutcome outcome = run_one(obj, cfg);
                if (outcome.status == "diverged") result.all_ok = false;

                SummaryRow row = make_row(spec, outcome, s, seed);
                row.rank = rank;
                result.rows.push_back(row);

                const std::string tag =
                    "inpaint_seed" + std::to_string(seed) + "_" + row.solver;
                save_trace_csv(outcome.trace,
                               (fs::path(spec.outdir) / ("trace_" + tag + ".csv")).string());
                save_trace_sidecar(outcome.trace, cfg,
                                   (fs::path(spec.outdir) / ("trace_" + tag + ".json")).string());

                ImageTensor recovered;
                recovered.tensor = outcome.trace.final_iterate;
                recovered.provenance = img.provenance + " recovered";
                save_image(recovered,
                           (fs::path(spec.outdir) / ("recovered_" + tag + ".ppm")).string());
            }
        }
    }

    result.summary_path = (fs::path(spec.outdir) / "summary.csv").string();
    std::ofstream out(result.summary_path);
    if (!out) throw IoError("cannot open for writing: " + result.summary_path);
    out << summary_csv_text(result.rows);
    if (!out) throw IoError("write failed: " + result.summary_path);
    return result;
}

}  // namespace tubal
