#ifndef TUBAL_TPROD_HPP
#define TUBAL_TPROD_HPP

#include <Eigen/Dense>

#include <vector>

#include "tubal/errors.hpp"
#include "tubal/tensor.hpp"
#include "tubal/transform.hpp"

namespace tubal {

/// t-product A * B, equal to fold(bcirc(A) * unfold(B)) but computed as
/// independent matrix products in the transform domain.
template <class Real>
Tensor3<Real> tprod(const Tensor3<Real>& a, const Tensor3<Real>& b) {
    if (a.n2() != b.n1() || a.n3() != b.n3())
        throw ShapeError("tprod: incompatible operands " + dims_str(a.dims()) + " and " +
                         dims_str(b.dims()));
    const Index n3 = a.n3();
    auto ah = dft_half(a);
    auto bh = dft_half(b);
    for (std::size_t f = 0; f < ah.size(); ++f) ah[f] = (ah[f] * bh[f]).eval();
    return idft_half(ah, n3);
}

/// Tensor transpose: slice 1 transposed, remaining transposed slices in
/// reversed order, so that bcirc(transpose(X)) = bcirc(X)^T.
template <class Real>
Tensor3<Real> ttranspose(const Tensor3<Real>& x) {
    Tensor3<Real> y(x.n2(), x.n1(), x.n3());
    y.slice(0) = x.slice(0).transpose();
    for (Index k = 1; k < x.n3(); ++k) y.slice(k) = x.slice(x.n3() - k).transpose();
    return y;
}

/// Identity element of the t-product: first frontal slice is the identity
/// matrix, all other slices are zero.
template <class Real = double>
Tensor3<Real> identity_tensor(Index n, Index n3) {
    Tensor3<Real> id(n, n, n3);
    id.slice(0).setIdentity();
    return id;
}

/// True iff Q * Q^T and Q^T * Q are both identity tensors within tol
/// (Frobenius norm of the difference).
template <class Real>
bool is_orthogonal(const Tensor3<Real>& q, Real tol = Real(1e-10)) {
    const Tensor3<Real> qt = ttranspose(q);
    const Real left = fro_norm(tprod(q, qt) - identity_tensor<Real>(q.n1(), q.n3()));
    const Real right = fro_norm(tprod(qt, q) - identity_tensor<Real>(q.n2(), q.n3()));
    return left <= tol && right <= tol;
}

}  // namespace tubal

#endif
