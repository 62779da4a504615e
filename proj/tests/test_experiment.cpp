#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tubal/experiment.hpp"
#include "tubal/generators.hpp"
#include "tubal/image.hpp"
#include "tubal/io.hpp"
#include "tubal/tsvd.hpp"

using namespace tubal;
namespace fs = std::filesystem;

namespace {

fs::path work_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() /
                 ("tubal_exp_test_" + std::to_string(::getpid())) / name;
    fs::create_directories(p);
    return p;
}

ExperimentSpec tiny_cs_spec(const std::string& outdir) {
    ExperimentSpec spec;
    spec.kind = ExperimentSpec::Kind::cs_sweep;
    spec.outdir = outdir;
    spec.dims = {6, 5, 4};
    spec.ranks = {1, 2};
    spec.rates = {1.0};
    spec.seeds = {1, 2};
    SolverSpec istht_spec;
    istht_spec.gamma = 0.3;
    istht_spec.max_iters = 40;
    spec.solvers = {istht_spec};
    return spec;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

}  // namespace

TEST_CASE("spec parsing round trip") {
    const std::string text = R"({
        "kind": "cs_sweep",
        "outdir": "/tmp/somewhere",
        "seeds": [1, 2, 3],
        "dims": [20, 20, 10],
        "ranks": [1, 2],
        "rates": [0.6],
        "sigmas": [0.01, 0.02],
        "batches": [200, 400],
        "solvers": [
            {"variant": "istht", "gamma": 1.0, "max_iters": 300, "tol": 1e-7},
            {"variant": "bstoistht", "gamma": 0.5, "batch_size": 100}
        ]
    })";
    const ExperimentSpec spec = parse_experiment_spec(text);
    CHECK(spec.kind == ExperimentSpec::Kind::cs_sweep);
    CHECK(spec.outdir == "/tmp/somewhere");
    CHECK(spec.seeds == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(spec.dims == (Dims3{20, 20, 10}));
    CHECK(spec.ranks == std::vector<Index>{1, 2});
    CHECK(spec.rates == std::vector<double>{0.6});
    CHECK(spec.sigmas == std::vector<double>{0.01, 0.02});
    CHECK(spec.batches == std::vector<Index>{200, 400});
    REQUIRE(spec.solvers.size() == 2);
    CHECK(spec.solvers[0].variant == SolverVariant::istht);
    CHECK(spec.solvers[0].max_iters == 300);
    CHECK(spec.solvers[0].tol == 1e-7);
    CHECK(spec.solvers[1].variant == SolverVariant::bstoistht);
    CHECK(spec.solvers[1].batch_size == 100);

    const std::string inpaint = R"({
        "kind": "inpaint",
        "outdir": "/tmp/elsewhere",
        "seeds": [7],
        "image": "striped",
        "image_size": 40,
        "band": 10,
        "box": [8, 6],
        "rank": 3,
        "solvers": [{"variant": "istht"}]
    })";
    const ExperimentSpec ispec = parse_experiment_spec(inpaint);
    CHECK(ispec.kind == ExperimentSpec::Kind::inpaint);
    CHECK(ispec.image == "striped");
    CHECK(ispec.image_size == 40);
    CHECK(ispec.band == 10);
    CHECK(ispec.box_w == 8);
    CHECK(ispec.box_h == 6);
    REQUIRE(ispec.inpaint_rank.has_value());
    CHECK(*ispec.inpaint_rank == 3);
}

TEST_CASE("spec parsing rejects malformed input") {
    CHECK_THROWS_AS(parse_experiment_spec("{ nope"), ParseError);
    CHECK_THROWS_AS(parse_experiment_spec(R"({"kind":"walk"})"), ArgumentError);
    // missing required fields surface as parse errors
    CHECK_THROWS_AS(parse_experiment_spec(R"({"kind":"cs_sweep"})"), ParseError);

    auto reject = [](const std::string& patch) {
        const std::string text = R"({"kind":"cs_sweep","outdir":"/tmp/o","seeds":[1],
            "dims":[6,5,4],"ranks":[1],"rates":[0.6],
            "solvers":[{"variant":"istht"}],)" +
                                 patch + "}";
        CHECK_THROWS_AS(parse_experiment_spec(text), ArgumentError);
    };
    reject(R"("ranks":[0])");
    reject(R"("ranks":[9])");
    reject(R"("rates":[0.0])");
    reject(R"("rates":[1.5])");
    reject(R"("sigmas":[-0.1])");
    reject(R"("batches":[0])");
    reject(R"("seeds":[])");
    reject(R"("solvers":[])");

    CHECK_THROWS_AS(parse_experiment_spec(
                        R"({"kind":"inpaint","outdir":"/tmp/o","seeds":[1],
                            "image":"mosaic","solvers":[{"variant":"istht"}]})"),
                    ArgumentError);
    CHECK_THROWS_AS(parse_experiment_spec(
                        R"({"kind":"cs_sweep","outdir":"/tmp/o","seeds":[1],
                            "dims":[6,5,4],"ranks":[1],"rates":[0.6],
                            "solvers":[{"variant":"sgd"}]})"),
                    ArgumentError);
}

TEST_CASE("spec file loading") {
    const fs::path dir = work_dir("spec_load");
    const std::string path = (dir / "spec.json").string();
    {
        std::ofstream out(path);
        out << R"({"kind":"cs_sweep","outdir":")" << dir.string()
            << R"(","seeds":[5],"dims":[6,5,4],"ranks":[1],"rates":[0.5],
                "solvers":[{"variant":"istht"}]})";
    }
    const ExperimentSpec spec = load_experiment_spec(path);
    CHECK(spec.seeds == std::vector<std::uint64_t>{5});
    CHECK_THROWS_AS(load_experiment_spec((dir / "absent.json").string()), IoError);
}

TEST_CASE("summary csv layout") {
    SummaryRow row;
    row.kind = "cs_sweep";
    row.rank = 2;
    row.rate = 0.6;
    row.sigma = 0.0;
    row.batch = 0;
    row.solver = "istht";
    row.seed = 3;
    row.status = "converged";
    row.iterations = 41;
    row.final_objective = 1e-12;
    row.final_re = 5e-7;
    row.iters_to_1e2 = 17;
    row.wall_ms = 12.5;

    const std::string text = summary_csv_text({row});
    const auto nl = text.find('\n');
    CHECK(text.substr(0, nl) ==
          "kind,rank,rate,sigma,batch,solver,seed,status,iterations,final_objective,"
          "final_re,iters_to_1e2,iters_to_1e4,wall_ms");
    const std::string body = text.substr(nl + 1);
    CHECK(body.find("cs_sweep,2,0.6,0,0,istht,3,converged,41,") == 0);
    CHECK(body.find(",17,,") != std::string::npos);  // empty iters_to_1e4 column
}

TEST_CASE("cs sweep produces one row per point and seed") {
    const fs::path dir = work_dir("cs_rows");
    const ExperimentSpec spec = tiny_cs_spec(dir.string());
    const ExperimentResult result = run_experiment(spec);

    CHECK(result.rows.size() == 4);  // 2 ranks x 1 rate x 2 seeds x 1 solver
    CHECK(result.all_ok);
    CHECK(fs::exists(result.summary_path));

    const std::string summary = slurp(result.summary_path);
    std::size_t lines = 0;
    for (char c : summary)
        if (c == '\n') ++lines;
    CHECK(lines == 5);  // header + 4 rows

    std::size_t csvs = 0, sidecars = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("trace_", 0) == 0 && name.size() > 4 &&
            name.substr(name.size() - 4) == ".csv")
            ++csvs;
        if (name.rfind("trace_", 0) == 0 && name.size() > 5 &&
            name.substr(name.size() - 5) == ".json")
            ++sidecars;
    }
    CHECK(csvs == 4);
    CHECK(sidecars == 4);

    for (const auto& row : result.rows) {
        CHECK(row.kind == "cs_sweep");
        CHECK(row.rate == 1.0);
        CHECK(row.batch == 0);
        REQUIRE(row.final_re.has_value());
        CHECK(std::isfinite(*row.final_re));
    }
}

TEST_CASE("batch axis applies to batched solvers only") {
    const fs::path dir = work_dir("batch_axis");
    ExperimentSpec spec = tiny_cs_spec(dir.string());
    spec.ranks = {1};
    spec.seeds = {4};
    spec.batches = {2, 4};
    SolverSpec batched;
    batched.variant = SolverVariant::bstoistht;
    batched.gamma = 0.05;
    batched.max_iters = 10;
    batched.tol = 1e-12;
    SolverSpec plain;
    plain.gamma = 0.3;
    plain.max_iters = 10;
    spec.solvers = {plain, batched};

    const ExperimentResult result = run_experiment(spec);
    REQUIRE(result.rows.size() == 3);
    CHECK(result.rows[0].solver == "istht");
    CHECK(result.rows[0].batch == 0);
    CHECK(result.rows[1].solver == "bstoistht");
    CHECK(result.rows[1].batch == 2);
    CHECK(result.rows[2].solver == "bstoistht");
    CHECK(result.rows[2].batch == 4);
}

TEST_CASE("identical specs give identical results") {
    ExperimentSpec a = tiny_cs_spec(work_dir("rep_a").string());
    a.ranks = {1};
    SolverSpec sto;
    sto.variant = SolverVariant::stoistht;
    sto.gamma = 0.01;
    sto.max_iters = 15;
    sto.tol = 1e-12;
    a.solvers.push_back(sto);
    ExperimentSpec b = a;
    b.outdir = work_dir("rep_b").string();

    const ExperimentResult ra = run_experiment(a);
    const ExperimentResult rb = run_experiment(b);
    REQUIRE(ra.rows.size() == rb.rows.size());
    for (std::size_t i = 0; i < ra.rows.size(); ++i) {
        CHECK(ra.rows[i].status == rb.rows[i].status);
        CHECK(ra.rows[i].iterations == rb.rows[i].iterations);
        CHECK(ra.rows[i].final_objective == rb.rows[i].final_objective);
        CHECK(*ra.rows[i].final_re == *rb.rows[i].final_re);
        CHECK(ra.rows[i].iters_to_1e2 == rb.rows[i].iters_to_1e2);
        CHECK(ra.rows[i].iters_to_1e4 == rb.rows[i].iters_to_1e4);
    }
}

TEST_CASE("divergence is recorded without aborting the sweep") {
    const fs::path dir = work_dir("diverge");
    ExperimentSpec spec = tiny_cs_spec(dir.string());
    spec.ranks = {1};
    spec.seeds = {1};
    spec.solvers[0].gamma = 1e8;
    const ExperimentResult result = run_experiment(spec);
    REQUIRE(result.rows.size() == 1);
    CHECK_FALSE(result.all_ok);
    CHECK(result.rows[0].status == "diverged");
    CHECK(fs::exists(result.summary_path));
}

TEST_CASE("checkerboard inpainting experiment") {
    const fs::path dir = work_dir("inpaint_board");
    ExperimentSpec spec;
    spec.kind = ExperimentSpec::Kind::inpaint;
    spec.outdir = dir.string();
    spec.seeds = {3};
    spec.image = "checkerboard";
    spec.image_size = 16;
    spec.cell = 4;
    spec.box_w = 4;
    spec.box_h = 4;
    SolverSpec s;
    s.gamma = 1.0;
    s.max_iters = 300;
    s.tol = 1e-9;
    spec.solvers = {s};

    const ExperimentResult result = run_experiment(spec);
    REQUIRE(result.rows.size() == 1);
    const SummaryRow& row = result.rows[0];
    CHECK(row.kind == "inpaint");
    CHECK(row.rank == 2);  // measured from the generated image
    REQUIRE(row.final_re.has_value());
    CHECK(*row.final_re <= 1e-4);
    REQUIRE(row.iters_to_1e2.has_value());

    CHECK(fs::exists(dir / "trace_inpaint_seed3_istht.csv"));
    CHECK(fs::exists(dir / "recovered_inpaint_seed3_istht.ppm"));
    const ImageTensor recovered =
        load_image((dir / "recovered_inpaint_seed3_istht.ppm").string());
    CHECK(recovered.tensor.dims() == (Dims3{16, 16, 3}));
}

TEST_CASE("ppm file inpainting uses the caller rank") {
    const fs::path dir = work_dir("inpaint_ppm");
    const ImageTensor board = make_checkerboard(16, 4, 9);
    const std::string ppm_path = (dir / "input.ppm").string();
    save_image(board, ppm_path);

    ExperimentSpec spec;
    spec.kind = ExperimentSpec::Kind::inpaint;
    spec.outdir = dir.string();
    spec.seeds = {1};
    spec.image = ppm_path;
    spec.box_w = 4;
    spec.box_h = 4;
    spec.inpaint_rank = 2;
    SolverSpec s;
    s.gamma = 1.0;
    s.max_iters = 200;
    s.tol = 1e-8;
    spec.solvers = {s};

    const ExperimentResult result = run_experiment(spec);
    REQUIRE(result.rows.size() == 1);
    CHECK(result.rows[0].rank == 2);
    REQUIRE(result.rows[0].final_re.has_value());
    // quantized input: recovery floor is the PPM rounding error, not 1e-4
    CHECK(*result.rows[0].final_re <= 1e-2);
}
