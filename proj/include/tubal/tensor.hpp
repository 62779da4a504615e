#ifndef TUBAL_TENSOR_HPP
#define TUBAL_TENSOR_HPP

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <string>

#include "tubal/errors.hpp"

namespace tubal {

using Index = Eigen::Index;
using Dims3 = std::array<Index, 3>;

inline Index dim_product(const Dims3& d) { return d[0] * d[1] * d[2]; }

inline std::string dims_str(const Dims3& d) {
    return std::to_string(d[0]) + "x" + std::to_string(d[1]) + "x" + std::to_string(d[2]);
}

// A tube (tubal scalar) is the length-n3 fiber X(i,j,:).
template <class Scalar>
using Tube = Eigen::Vector<Scalar, Eigen::Dynamic>;

/// Dense third-order tensor of size n1 x n2 x n3.
///
/// Storage is frontal-slice-major and column-major within each slice:
/// entry (i,j,k) lives at linear offset i + n1*j + n1*n2*k.  Internally the
/// data is held as an n1 x (n2*n3) column-major matrix, so frontal slices are
/// contiguous column blocks and the whole tensor doubles as the
/// (n1*n2) x n3 tube matrix (one tube per row) without copying.
template <class Scalar>
class Tensor3 {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Vector<Scalar, Eigen::Dynamic>;

    Tensor3() : n1_(0), n2_(0), n3_(0) {}

    // Zero-initialized; dimensions must be positive.
    Tensor3(Index n1, Index n2, Index n3) : n1_(n1), n2_(n2), n3_(n3) {
        if (n1 < 1 || n2 < 1 || n3 < 1)
            throw ArgumentError("Tensor3 dimensions must be positive, got " +
                                dims_str({n1, n2, n3}));
        m_.setZero(n1, n2 * n3);
    }

    Index n1() const { return n1_; }
    Index n2() const { return n2_; }
    Index n3() const { return n3_; }
    Dims3 dims() const { return {n1_, n2_, n3_}; }
    Index size() const { return n1_ * n2_ * n3_; }
    bool empty() const { return size() == 0; }

    Scalar& operator()(Index i, Index j, Index k) {
        eigen_assert(i >= 0 && i < n1_ && j >= 0 && j < n2_ && k >= 0 && k < n3_);
        return m_(i, j + n2_ * k);
    }
    const Scalar& operator()(Index i, Index j, Index k) const {
        eigen_assert(i >= 0 && i < n1_ && j >= 0 && j < n2_ && k >= 0 && k < n3_);
        return m_(i, j + n2_ * k);
    }

    // Frontal slice X(:,:,k) as a writable n1 x n2 block expression.
    auto slice(Index k) { return m_.middleCols(k * n2_, n2_); }
    auto slice(Index k) const { return m_.middleCols(k * n2_, n2_); }

    // Tube X(i,j,:) as a strided view of length n3.
    auto tube(Index i, Index j) {
        return Eigen::Map<Vector, 0, Eigen::InnerStride<>>(
            m_.data() + i + n1_ * j, n3_, Eigen::InnerStride<>(n1_ * n2_));
    }
    auto tube(Index i, Index j) const {
        return Eigen::Map<const Vector, 0, Eigen::InnerStride<>>(
            m_.data() + i + n1_ * j, n3_, Eigen::InnerStride<>(n1_ * n2_));
    }

    // The (n1*n2) x n3 matrix whose row (i + n1*j) is the tube X(i,j,:).
    auto tube_matrix() {
        return Eigen::Map<Matrix>(m_.data(), n1_ * n2_, n3_);
    }
    auto tube_matrix() const {
        return Eigen::Map<const Matrix>(m_.data(), n1_ * n2_, n3_);
    }

    // vec(X): frontal slices stacked after column-wise stacking of each slice.
    auto as_vec() { return Eigen::Map<Vector>(m_.data(), size()); }
    auto as_vec() const { return Eigen::Map<const Vector>(m_.data(), size()); }

    Scalar* data() { return m_.data(); }
    const Scalar* data() const { return m_.data(); }

    void setZero() { m_.setZero(); }
    bool allFinite() const { return m_.allFinite(); }

    // Whole-tensor storage as n1 x (n2*n3); handy for elementwise expressions.
    Matrix& storage() { return m_; }
    const Matrix& storage() const { return m_; }

    Tensor3& operator+=(const Tensor3& o) {
        check_same_dims(o, "+=");
        m_ += o.m_;
        return *this;
    }
    Tensor3& operator-=(const Tensor3& o) {
        check_same_dims(o, "-=");
        m_ -= o.m_;
        return *this;
    }
    Tensor3& operator*=(Scalar s) {
        m_ *= s;
        return *this;
    }

    friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
    friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
    friend Tensor3 operator*(Tensor3 a, Scalar s) { return a *= s; }
    friend Tensor3 operator*(Scalar s, Tensor3 a) { return a *= s; }
    friend Tensor3 operator-(Tensor3 a) {
        a.m_ = -a.m_;
        return a;
    }

    void check_same_dims(const Tensor3& o, const char* what) const {
        if (dims() != o.dims())
            throw ShapeError(std::string("dimension mismatch in ") + what + ": " +
                             dims_str(dims()) + " vs " + dims_str(o.dims()));
    }

private:
    Index n1_, n2_, n3_;
    Matrix m_;
};

using Tensor3d = Tensor3<double>;

/// <X, Y> = sum_{ijk} X(i,j,k) * Y(i,j,k)  (conjugated in X for complex scalars).
template <class Scalar>
Scalar inner(const Tensor3<Scalar>& x, const Tensor3<Scalar>& y) {
    x.check_same_dims(y, "inner");
    return x.as_vec().dot(y.as_vec());
}

template <class Scalar>
auto fro_norm(const Tensor3<Scalar>& x) {
    return x.as_vec().norm();
}

}  // namespace tubal

#endif
