#ifndef TUBAL_MEASUREMENT_HPP
#define TUBAL_MEASUREMENT_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "tubal/errors.hpp"
#include "tubal/tensor.hpp"

namespace tubal {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Index linear_index(Index i, Index j, Index k, const Dims3& d) {
    return i + d[0] * (j + d[1] * k);
}

inline std::array<Index, 3> unravel_index(Index lin, const Dims3& d) {
    const Index i = lin % d[0];
    const Index j = (lin / d[0]) % d[1];
    const Index k = lin / (d[0] * d[1]);
    return {i, j, k};
}

/// Linear map theta from tensor space to R^M, either M dense sensing tensors
/// (rows of a single M x n1*n2*n3 matrix, row j = vec(A_j)) or extraction of
/// the entries in an observed index set Omega.
///
/// Mask indices are kept sorted lexicographically by (k,j,i), which in the
/// slice-major layout is simply ascending linear order, so measurement
/// vectors are bit-reproducible.
struct MeasurementOp {
    enum class Mode { dense_sensing, mask_projection };

    Mode mode = Mode::dense_sensing;
    Dims3 dims{0, 0, 0};
    RowMatrixXd sensing;        // dense mode
    std::vector<Index> omega;   // mask mode, sorted linear indices

    Index measurements() const {
        return mode == Mode::dense_sensing ? sensing.rows()
                                           : static_cast<Index>(omega.size());
    }

    static MeasurementOp dense(RowMatrixXd a, const Dims3& dims) {
        if (a.cols() != dim_product(dims))
            throw ShapeError("dense measurement op: " + std::to_string(a.cols()) +
                             " columns vs dims " + dims_str(dims));
        if (a.rows() < 1) throw ArgumentError("dense measurement op: need M >= 1");
        MeasurementOp op;
        op.mode = Mode::dense_sensing;
        op.dims = dims;
        op.sensing = std::move(a);
        return op;
    }

    static MeasurementOp mask(std::vector<Index> omega, const Dims3& dims) {
        if (omega.empty()) throw ArgumentError("mask measurement op: empty index set");
        std::sort(omega.begin(), omega.end());
        const Index n = dim_product(dims);
        if (omega.front() < 0 || omega.back() >= n)
            throw ArgumentError("mask measurement op: index out of range for dims " +
                                dims_str(dims));
        if (std::adjacent_find(omega.begin(), omega.end()) != omega.end())
            throw ArgumentError("mask measurement op: duplicate indices");
        MeasurementOp op;
        op.mode = Mode::mask_projection;
        op.dims = dims;
        op.omega = std::move(omega);
        return op;
    }
};

/// theta(X): dense mode y_j = <A_j, X>; mask mode extraction at Omega.
inline Eigen::VectorXd apply(const MeasurementOp& op, const Tensor3d& x) {
    if (x.dims() != op.dims)
        throw ShapeError("measurement apply: operand is " + dims_str(x.dims()) +
                         ", op expects " + dims_str(op.dims));
    if (op.mode == MeasurementOp::Mode::dense_sensing) return op.sensing * x.as_vec();
    Eigen::VectorXd y(op.omega.size());
    const double* p = x.data();
    for (std::size_t t = 0; t < op.omega.size(); ++t) y(t) = p[op.omega[t]];
    return y;
}

/// theta^*(z): dense mode sum_j z_j A_j; mask mode scatter back to Omega.
/// Satisfies <theta(X), z> = <X, theta^*(z)>.
inline Tensor3d adjoint(const MeasurementOp& op, const Eigen::VectorXd& z) {
    if (z.size() != op.measurements())
        throw ShapeError("measurement adjoint: vector length " + std::to_string(z.size()) +
                         " vs M = " + std::to_string(op.measurements()));
    Tensor3d x(op.dims[0], op.dims[1], op.dims[2]);
    if (op.mode == MeasurementOp::Mode::dense_sensing) {
        x.as_vec() = op.sensing.transpose() * z;
    } else {
        double* p = x.data();
        for (std::size_t t = 0; t < op.omega.size(); ++t) p[op.omega[t]] = z(t);
    }
    return x;
}

/// The j-th sensing tensor A_j of a dense op, materialized.
inline Tensor3d sensing_tensor(const MeasurementOp& op, Index j) {
    if (op.mode != MeasurementOp::Mode::dense_sensing)
        throw ArgumentError("sensing_tensor: op is not in dense mode");
    if (j < 0 || j >= op.sensing.rows())
        throw ArgumentError("sensing_tensor: index " + std::to_string(j) + " out of range");
    Tensor3d a(op.dims[0], op.dims[1], op.dims[2]);
    a.as_vec() = op.sensing.row(j);
    return a;
}

}  // namespace tubal

#endif
