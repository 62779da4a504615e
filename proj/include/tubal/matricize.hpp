#ifndef TUBAL_MATRICIZE_HPP
#define TUBAL_MATRICIZE_HPP

#include <Eigen/Dense>

#include "tubal/errors.hpp"
#include "tubal/tensor.hpp"

// Matricizations of a third-order tensor.  bcirc/bdiag are O(n3) larger than
// the tensor itself; the library uses them as brute-force oracles and keeps
// all production paths in the transform domain.

namespace tubal {

/// Frontal slices stacked vertically: unfold(X) is (n1*n3) x n2 with block k
/// equal to X(:,:,k).
template <class Scalar>
typename Tensor3<Scalar>::Matrix unfold(const Tensor3<Scalar>& x) {
    typename Tensor3<Scalar>::Matrix m(x.n1() * x.n3(), x.n2());
    for (Index k = 0; k < x.n3(); ++k)
        m.middleRows(k * x.n1(), x.n1()) = x.slice(k);
    return m;
}

/// Inverse of unfold: fold(unfold(X), X.dims()) == X.
template <class Derived>
Tensor3<typename Derived::Scalar> fold(const Eigen::MatrixBase<Derived>& m,
                                       const Dims3& dims) {
    if (m.rows() != dims[0] * dims[2] || m.cols() != dims[1])
        throw ShapeError("fold: matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", incompatible with dims " +
                         dims_str(dims));
    Tensor3<typename Derived::Scalar> x(dims[0], dims[1], dims[2]);
    for (Index k = 0; k < dims[2]; ++k)
        x.slice(k) = m.middleRows(k * dims[0], dims[0]);
    return x;
}

/// Block-circulant matrix of size (n1*n3) x (n2*n3): block (r,c) is the
/// frontal slice (r - c) mod n3, so block column c holds the slices cyclically
/// shifted down by c.
template <class Scalar>
typename Tensor3<Scalar>::Matrix bcirc(const Tensor3<Scalar>& x) {
    const Index n1 = x.n1(), n2 = x.n2(), n3 = x.n3();
    typename Tensor3<Scalar>::Matrix m(n1 * n3, n2 * n3);
    for (Index c = 0; c < n3; ++c)
        for (Index r = 0; r < n3; ++r)
            m.block(r * n1, c * n2, n1, n2) = x.slice((r - c + n3) % n3);
    return m;
}

/// Block-diagonal matrix with the frontal slices on the diagonal.
template <class Scalar>
typename Tensor3<Scalar>::Matrix bdiag(const Tensor3<Scalar>& x) {
    const Index n1 = x.n1(), n2 = x.n2(), n3 = x.n3();
    typename Tensor3<Scalar>::Matrix m =
        Tensor3<Scalar>::Matrix::Zero(n1 * n3, n2 * n3);
    for (Index k = 0; k < n3; ++k)
        m.block(k * n1, k * n2, n1, n2) = x.slice(k);
    return m;
}

}  // namespace tubal

#endif
