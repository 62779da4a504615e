#ifndef TUBAL_TSVD_HPP
#define TUBAL_TSVD_HPP

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tubal/errors.hpp"
#include "tubal/tensor.hpp"
#include "tubal/tprod.hpp"
#include "tubal/transform.hpp"

namespace tubal {

/// Factors of X = U * S * V^T with orthogonal U, V and f-diagonal S whose
/// transform-domain diagonals are real, nonnegative and nonincreasing.
template <class Real>
struct TSvdFactors {
    Tensor3<Real> U;  // n1 x n1 x n3
    Tensor3<Real> S;  // n1 x n2 x n3, f-diagonal
    Tensor3<Real> V;  // n2 x n2 x n3
};

/// Rank-r factors of the reduced decomposition U_r * S_r * V_r^T = stht(X, r).
template <class Real>
struct ReducedTSvd {
    Tensor3<Real> U;  // n1 x r x n3
    Tensor3<Real> S;  // r x r x n3
    Tensor3<Real> V;  // n2 x r x n3
};

template <class Real>
struct RankReport {
    int tubal_rank = 0;
    std::vector<Real> tube_norms;  // Frobenius norms of S(i,i,:), sorted nonincreasing
    Real zero_threshold = Real(0);
};

using TSvdFactorsd = TSvdFactors<double>;
using ReducedTSvdd = ReducedTSvd<double>;
using RankReportd = RankReport<double>;

namespace detail {

template <class Real>
struct SliceSvd {
    Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic> U, V;
    Eigen::Vector<Real, Eigen::Dynamic> svals;
};

// Factorization soundness check: finite nonincreasing singular values,
// orthonormal factors, and reconstruction of the input.  Catches the garbage
// the bidiagonal divide-and-conquer kernel can produce on structured slices
// (repeated singular values trip its deflation) without signalling failure.
template <class Real, class Svd>
bool svd_is_sound(
    const Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>& m,
    const Svd& svd) {
    using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
    const auto& sv = svd.singularValues();
    if (!sv.allFinite() || sv.size() == 0 || sv(sv.size() - 1) < Real(0)) return false;
    for (Index i = 0; i + 1 < sv.size(); ++i)
        if (sv(i) < sv(i + 1)) return false;

    const ComplexMatrix& u = svd.matrixU();
    const ComplexMatrix& v = svd.matrixV();
    if (!u.allFinite() || !v.allFinite()) return false;
    const Real ortho_tol = Real(1e-9);
    if ((u.adjoint() * u - ComplexMatrix::Identity(u.cols(), u.cols())).norm() >
        ortho_tol * std::sqrt(static_cast<Real>(u.cols())))
        return false;
    if ((v.adjoint() * v - ComplexMatrix::Identity(v.cols(), v.cols())).norm() >
        ortho_tol * std::sqrt(static_cast<Real>(v.cols())))
        return false;

    const Index k = sv.size();
    const Real defect =
        (u.leftCols(k) * sv.asDiagonal() * v.leftCols(k).adjoint() - m).norm();
    return defect <= Real(1e-9) * m.norm();
}

// Per-slice complex SVD.  Zero slices get identity factors; Jacobi is used
// for small slices, bidiagonal divide-and-conquer otherwise, with a soundness
// check and Jacobi fallback guarding the latter.
template <class Real>
SliceSvd<Real> slice_svd(
    const Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>& m,
    unsigned options, Index slice_index) {
    using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
    const Index rows = m.rows(), cols = m.cols(), minmn = std::min(rows, cols);
    const bool full = options & Eigen::ComputeFullU;
    const bool want_uv = options != 0;

    SliceSvd<Real> out;
    if (m.norm() == Real(0)) {
        out.svals = Eigen::Vector<Real, Eigen::Dynamic>::Zero(minmn);
        if (want_uv) {
            out.U = ComplexMatrix::Identity(rows, full ? rows : minmn);
            out.V = ComplexMatrix::Identity(cols, full ? cols : minmn);
        }
        return out;
    }

    // Factors are always computed so the result can be verified.
    const unsigned solve_options =
        want_uv ? options
                : static_cast<unsigned>(Eigen::ComputeThinU | Eigen::ComputeThinV);

    auto extract = [&](const auto& svd) {
        out.svals = svd.singularValues();
        if (want_uv) {
            out.U = svd.matrixU();
            out.V = svd.matrixV();
        }
    };

    if (minmn < 16) {
        Eigen::JacobiSVD<ComplexMatrix> svd(m, solve_options);
        if (svd.info() != Eigen::Success)
            throw NumericalError("SVD did not converge on frontal slice " +
                                 std::to_string(slice_index));
        extract(svd);
        return out;
    }

    Eigen::BDCSVD<ComplexMatrix> svd(m, solve_options);
    if (svd.info() == Eigen::Success && svd_is_sound<Real>(m, svd)) {
        extract(svd);
        return out;
    }

    Eigen::JacobiSVD<ComplexMatrix> jsvd(m, solve_options);
    if (jsvd.info() != Eigen::Success || !svd_is_sound<Real>(m, jsvd))
        throw NumericalError("SVD did not converge on frontal slice " +
                             std::to_string(slice_index));
    extract(jsvd);
    return out;
}

}  // namespace detail

/// Tensor singular value decomposition: per-slice SVD in the transform
/// domain, inverse transform of the factors.
template <class Real>
TSvdFactors<Real> tsvd(const Tensor3<Real>& x) {
    using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
    const Index n1 = x.n1(), n2 = x.n2(), n3 = x.n3();
    const Index minmn = std::min(n1, n2);
    auto xh = dft_half(x);
    const Index h = static_cast<Index>(xh.size());

    std::vector<ComplexMatrix> uh(h), sh(h), vh(h);
    for (Index f = 0; f < h; ++f) {
        auto svd = detail::slice_svd<Real>(xh[f], Eigen::ComputeFullU | Eigen::ComputeFullV, f);
        uh[f] = svd.U;
        vh[f] = svd.V;
        sh[f] = ComplexMatrix::Zero(n1, n2);
        sh[f].diagonal().head(minmn).real() = svd.svals;
    }

    TSvdFactors<Real> out;
    out.U = idft_half(uh, n3);
    out.S = idft_half(sh, n3);
    out.V = idft_half(vh, n3);
    return out;
}

/// Tubal rank with the tube norms that justify it.  A singular tube counts as
/// nonzero iff its Frobenius norm exceeds rel_tol times the largest one.
/// Tube norms are computed from the transform-domain singular values via
/// Parseval, so no factor tensors are materialized.
template <class Real>
RankReport<Real> tubal_rank(const Tensor3<Real>& x, Real rel_tol = Real(1e-10)) {
    if (!(rel_tol > Real(0) && rel_tol < Real(1)))
        throw ArgumentError("tubal_rank: rel_tol must lie in (0,1)");
    const Index n3 = x.n3();
    const Index minmn = std::min(x.n1(), x.n2());
    auto xh = dft_half(x);

    Eigen::Vector<Real, Eigen::Dynamic> sq = Eigen::Vector<Real, Eigen::Dynamic>::Zero(minmn);
    for (Index f = 0; f < static_cast<Index>(xh.size()); ++f) {
        auto svd = detail::slice_svd<Real>(xh[f], 0, f);
        sq += static_cast<Real>(spectral_weight(f, n3)) * svd.svals.array().square().matrix();
    }

    RankReport<Real> report;
    report.tube_norms.resize(minmn);
    for (Index i = 0; i < minmn; ++i)
        report.tube_norms[i] = std::sqrt(sq(i) / static_cast<Real>(n3));
    std::sort(report.tube_norms.begin(), report.tube_norms.end(), std::greater<Real>());

    const Real top = report.tube_norms.empty() ? Real(0) : report.tube_norms.front();
    report.zero_threshold = rel_tol * top;
    report.tubal_rank = static_cast<int>(
        std::count_if(report.tube_norms.begin(), report.tube_norms.end(),
                      [&](Real v) { return v > report.zero_threshold; }));
    return report;
}

/// Singular tube hard thresholding H_r: zero all singular tubes past the
/// first r, i.e. the best tubal-rank-r approximation of X.  The input is
/// normalized by its Frobenius norm around the decomposition (prescale),
/// which H_r commutes with; r >= min(n1,n2) returns X unchanged.
template <class Real>
Tensor3<Real> stht(const Tensor3<Real>& x, Index r, bool prescale = true) {
    using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
    if (r < 0) throw ArgumentError("stht: rank must be nonnegative, got " + std::to_string(r));
    if (r == 0) return Tensor3<Real>(x.n1(), x.n2(), x.n3());
    if (r >= std::min(x.n1(), x.n2())) return x;

    const Real c = prescale ? fro_norm(x) : Real(1);
    if (c == Real(0)) return Tensor3<Real>(x.n1(), x.n2(), x.n3());
    Tensor3<Real> work = x * (Real(1) / c);

    auto xh = dft_half(work);
    for (Index f = 0; f < static_cast<Index>(xh.size()); ++f) {
        auto svd = detail::slice_svd<Real>(xh[f], Eigen::ComputeThinU | Eigen::ComputeThinV, f);
        xh[f] = ComplexMatrix(svd.U.leftCols(r) * svd.svals.head(r).asDiagonal() *
                              svd.V.leftCols(r).adjoint());
    }
    Tensor3<Real> out = idft_half(xh, x.n3());
    out *= c;
    return out;
}

/// Rank-r factors with U_r * S_r * V_r^T = stht(X, r).
template <class Real>
ReducedTSvd<Real> reduced_tsvd(const Tensor3<Real>& x, Index r) {
    using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
    if (r < 1 || r > std::min(x.n1(), x.n2()))
        throw ArgumentError("reduced_tsvd: rank " + std::to_string(r) +
                            " out of range for dims " + dims_str(x.dims()));
    const Index n3 = x.n3();
    auto xh = dft_half(x);
    const Index h = static_cast<Index>(xh.size());

    std::vector<ComplexMatrix> uh(h), sh(h), vh(h);
    for (Index f = 0; f < h; ++f) {
        auto svd = detail::slice_svd<Real>(xh[f], Eigen::ComputeThinU | Eigen::ComputeThinV, f);
        uh[f] = svd.U.leftCols(r);
        vh[f] = svd.V.leftCols(r);
        sh[f] = ComplexMatrix::Zero(r, r);
        sh[f].diagonal().real() = svd.svals.head(r);
    }

    ReducedTSvd<Real> out;
    out.U = idft_half(uh, n3);
    out.S = idft_half(sh, n3);
    out.V = idft_half(vh, n3);
    return out;
}

}  // namespace tubal

#endif
