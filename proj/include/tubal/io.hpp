#ifndef TUBAL_IO_HPP
#define TUBAL_IO_HPP

#include <Eigen/Dense>

#include <string>

#include "tubal/measurement.hpp"
#include "tubal/solvers.hpp"
#include "tubal/tensor.hpp"
#include "tubal/tsvd.hpp"

// On-disk formats.
//
//   Tensor ("TNS3"): 4-byte magic `TNS3`, three little-endian u32 dims
//   (n1,n2,n3), then n1*n2*n3 little-endian f64 values in the tensor's
//   slice-major / column-major layout.  Readers reject bad magic and
//   truncated payloads.
//
//   Vector: little-endian u32 length, then that many little-endian f64.
//
//   Measurement op: a directory.  Dense mode holds manifest.json
//   {mode, M, dims} plus the sensing tensors A_000001.tns3 .. A_<M>.tns3;
//   mask mode holds manifest.json {mode, dims, indices} with 0-based [i,j,k]
//   triples sorted by (k,j,i).
//
//   Run trace: CSV with header iter,objective,rec_error,rel_step,ms
//   (rec_error empty when no ground truth was supplied), plus a JSON sidecar
//   with terminal status and a config echo.

namespace tubal {

void save_tensor(const Tensor3d& x, const std::string& path);
Tensor3d load_tensor(const std::string& path);

void save_vector(const Eigen::VectorXd& v, const std::string& path);
Eigen::VectorXd load_vector(const std::string& path);

void save_measurement_op(const MeasurementOp& op, const std::string& dir);
MeasurementOp load_measurement_op(const std::string& dir);

std::string rank_report_json(const RankReportd& report);
void save_rank_report(const RankReportd& report, const std::string& path);

void save_trace_csv(const RunTrace& trace, const std::string& path);
void save_trace_sidecar(const RunTrace& trace, const SolverConfig& cfg,
                        const std::string& path);

std::string solver_variant_name(SolverVariant v);
SolverVariant solver_variant_from_name(const std::string& name);

}  // namespace tubal

#endif
