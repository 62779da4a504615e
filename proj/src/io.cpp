#include "tubal/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "tubal/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

namespace tubal {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr char kMagic[4] = {'T', 'N', 'S', '3'};

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    return in;
}

void write_u32(std::ofstream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::ifstream& in, const std::string& path, const char* what) {
    std::uint32_t v = 0;
    const auto offset = static_cast<std::size_t>(in.tellg());
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
        throw ParseError(path + ": truncated while reading " + what, offset);
    return v;
}

void read_f64_block(std::ifstream& in, double* dst, std::size_t count,
                    const std::string& path) {
    const auto offset = static_cast<std::size_t>(in.tellg());
    if (!in.read(reinterpret_cast<char*>(dst),
                 static_cast<std::streamsize>(count * sizeof(double)))) {
        const auto got = static_cast<std::size_t>(in.gcount());
        throw ParseError(path + ": payload truncated", offset + got);
    }
}

void expect_eof(std::ifstream& in, const std::string& path) {
    const auto offset = static_cast<std::size_t>(in.tellg());
    if (in.peek() != std::ifstream::traits_type::eof())
        throw ParseError(path + ": trailing bytes after payload", offset);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json config_echo(const SolverConfig& cfg) {
    json j;
    j["rank"] = cfg.rank;
    j["gamma"] = cfg.gamma;
    j["max_iters"] = cfg.max_iters;
    j["tol"] = cfg.tol;
    j["variant"] = solver_variant_name(cfg.variant);
    j["batch_size"] = cfg.batch_size;
    j["seed"] = cfg.seed;
    j["aistht_mode"] = cfg.aistht_mode == AisthtMode::literal ? "literal" : "nesterov";
    j["trace_stride"] = cfg.trace_stride;
    return j;
}

}  // namespace

std::string solver_variant_name(SolverVariant v) {
    switch (v) {
        case SolverVariant::istht: return "istht";
        case SolverVariant::aistht: return "aistht";
        case SolverVariant::stoistht: return "stoistht";
        case SolverVariant::bstoistht: return "bstoistht";
    }
    throw ArgumentError("unknown solver variant");
}

SolverVariant solver_variant_from_name(const std::string& name) {
    if (name == "istht") return SolverVariant::istht;
    if (name == "aistht") return SolverVariant::aistht;
    if (name == "stoistht") return SolverVariant::stoistht;
    if (name == "bstoistht") return SolverVariant::bstoistht;
    throw ArgumentError("unknown solver variant: " + name);
}

void save_tensor(const Tensor3d& x, const std::string& path) {
    auto out = open_out(path);
    out.write(kMagic, 4);
    write_u32(out, static_cast<std::uint32_t>(x.n1()));
    write_u32(out, static_cast<std::uint32_t>(x.n2()));
    write_u32(out, static_cast<std::uint32_t>(x.n3()));
    out.write(reinterpret_cast<const char*>(x.data()),
              static_cast<std::streamsize>(x.size() * sizeof(double)));
    if (!out) throw IoError("write failed: " + path);
}

Tensor3d load_tensor(const std::string& path) {
    auto in = open_in(path);
    char magic[4] = {};
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw ParseError(path + ": bad magic, not a TNS3 file", 0);
    const auto n1 = read_u32(in, path, "dims");
    const auto n2 = read_u32(in, path, "dims");
    const auto n3 = read_u32(in, path, "dims");
    if (n1 == 0 || n2 == 0 || n3 == 0)
        throw ParseError(path + ": zero dimension in header", 4);
    Tensor3d x(n1, n2, n3);
    read_f64_block(in, x.data(), static_cast<std::size_t>(x.size()), path);
    expect_eof(in, path);
    return x;
}

void save_vector(const Eigen::VectorXd& v, const std::string& path) {
    auto out = open_out(path);
    write_u32(out, static_cast<std::uint32_t>(v.size()));
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!out) throw IoError("write failed: " + path);
}

Eigen::VectorXd load_vector(const std::string& path) {
    auto in = open_in(path);
    const auto n = read_u32(in, path, "length");
    Eigen::VectorXd v(n);
    if (n > 0) read_f64_block(in, v.data(), n, path);
    expect_eof(in, path);
    return v;
}

void save_measurement_op(const MeasurementOp& op, const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());

    json manifest;
    manifest["dims"] = {op.dims[0], op.dims[1], op.dims[2]};
    if (op.mode == MeasurementOp::Mode::dense_sensing) {
        manifest["mode"] = "dense_sensing";
        manifest["M"] = op.sensing.rows();
        for (Index j = 0; j < op.sensing.rows(); ++j) {
            char name[32];
            std::snprintf(name, sizeof name, "A_%06lld.tns3",
                          static_cast<long long>(j + 1));
            save_tensor(sensing_tensor(op, j), (fs::path(dir) / name).string());
        }
    } else {
        manifest["mode"] = "mask_projection";
        json idx = json::array();
        for (Index lin : op.omega) {
            const auto [i, j, k] = unravel_index(lin, op.dims);
            idx.push_back({i, j, k});
        }
        manifest["indices"] = std::move(idx);
    }
    auto out = open_out((fs::path(dir) / "manifest.json").string());
    out << manifest.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + dir + "/manifest.json");
}

MeasurementOp load_measurement_op(const std::string& dir) {
    const std::string manifest_path = (fs::path(dir) / "manifest.json").string();
    auto in = open_in(manifest_path);
    json manifest;
    try {
        in >> manifest;
    } catch (const json::parse_error& e) {
        throw ParseError(manifest_path + ": " + e.what(), e.byte);
    }

    try {
        const auto dims_j = manifest.at("dims");
        const Dims3 dims = {dims_j.at(0).get<Index>(), dims_j.at(1).get<Index>(),
                            dims_j.at(2).get<Index>()};
        const std::string mode = manifest.at("mode").get<std::string>();

        if (mode == "dense_sensing") {
            const Index m = manifest.at("M").get<Index>();
            RowMatrixXd a(m, dim_product(dims));
            for (Index j = 0; j < m; ++j) {
                char name[32];
                std::snprintf(name, sizeof name, "A_%06lld.tns3",
                              static_cast<long long>(j + 1));
                const Tensor3d t = load_tensor((fs::path(dir) / name).string());
                if (t.dims() != dims)
                    throw ShapeError(dir + ": sensing tensor " + name + " has dims " +
                                     dims_str(t.dims()) + ", manifest says " + dims_str(dims));
                a.row(j) = t.as_vec();
            }
            return MeasurementOp::dense(std::move(a), dims);
        }
        if (mode == "mask_projection") {
            std::vector<Index> omega;
            for (const auto& triple : manifest.at("indices"))
                omega.push_back(linear_index(triple.at(0).get<Index>(),
                                             triple.at(1).get<Index>(),
                                             triple.at(2).get<Index>(), dims));
            return MeasurementOp::mask(std::move(omega), dims);
        }
        throw ParseError(manifest_path + ": unknown mode \"" + mode + "\"", 0);
    } catch (const json::exception& e) {
        throw ParseError(manifest_path + ": " + e.what(), 0);
    }
}

std::string rank_report_json(const RankReportd& report) {
    json j;
    j["tubal_rank"] = report.tubal_rank;
    j["tube_norms"] = report.tube_norms;
    j["zero_threshold"] = report.zero_threshold;
    return j.dump(2) + "\n";
}

void save_rank_report(const RankReportd& report, const std::string& path) {
    auto out = open_out(path);
    out << rank_report_json(report);
    if (!out) throw IoError("write failed: " + path);
}

void save_trace_csv(const RunTrace& trace, const std::string& path) {
    auto out = open_out(path);
    out << "iter,objective,rec_error,rel_step,ms\n";
    for (const auto& rec : trace.records) {
        out << rec.iter << ',' << format_double(rec.objective) << ',';
        if (rec.rec_error) out << format_double(*rec.rec_error);
        out << ',' << format_double(rec.rel_step) << ',';
        char ms[32];
        std::snprintf(ms, sizeof ms, "%.3f", rec.ms);
        out << ms << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

void save_trace_sidecar(const RunTrace& trace, const SolverConfig& cfg,
                        const std::string& path) {
    json j;
    j["status"] = trace.status == SolveStatus::converged ? "converged" : "max_iters";
    j["iterations"] = trace.iterations;
    j["records"] = trace.records.size();
    j["final_objective"] = trace.final_objective();
    if (auto re = trace.final_rec_error()) j["final_rec_error"] = *re;
    j["config"] = config_echo(cfg);
    auto out = open_out(path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace tubal
