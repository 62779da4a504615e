#ifndef TUBAL_TRANSFORM_HPP
#define TUBAL_TRANSFORM_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

#include "tubal/errors.hpp"
#include "tubal/tensor.hpp"

// Discrete Fourier transform along tubes, the workhorse behind the t-product
// and the tensor SVD.  Convention: unnormalized forward, 1/n3 inverse.
//
// All tube lengths in this library are small (3..10 in every shipped
// workload), so the transform is computed as two real GEMMs against the
// (n1*n2) x n3 tube matrix instead of per-tube FFT calls.  Only slices
// 0..floor(n3/2) are computed; the rest follow by conjugate symmetry, which
// both halves the work and makes inverse transforms exactly real.

namespace tubal {

inline Index half_spectrum_size(Index n3) { return n3 / 2 + 1; }

// Weight of frequency f when summing |x_hat_f|^2 over the half spectrum:
// 1 for f = 0 and the Nyquist slice, 2 for frequencies with a mirror twin.
// Parseval under this convention: ||x||^2 = (1/n3) * sum_f w_f |x_hat_f|^2.
inline double spectral_weight(Index f, Index n3) {
    if (f == 0 || 2 * f == n3) return 1.0;
    return 2.0;
}

namespace detail {

// cos/sin of 2*pi*(f*k mod n3)/n3 with exact values at the half-turn points,
// so conjugate symmetry and Nyquist realness hold to the last bit.
inline void unit_root(Index f, Index k, Index n3, double& c, double& s) {
    const Index m = (f * k) % n3;
    if (m == 0) {
        c = 1.0; s = 0.0;
    } else if (2 * m == n3) {
        c = -1.0; s = 0.0;
    } else if (4 * m == n3) {
        c = 0.0; s = 1.0;
    } else if (4 * m == 3 * n3) {
        c = 0.0; s = -1.0;
    } else {
        const double theta = 2.0 * M_PI * static_cast<double>(m) / static_cast<double>(n3);
        c = std::cos(theta);
        s = std::sin(theta);
    }
}

}  // namespace detail

// Unnormalized DFT matrix F with F(f,k) = exp(-2*pi*i*f*k/n3).
template <class Real = double>
Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic> dft_matrix(Index n3) {
    Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic> f(n3, n3);
    for (Index r = 0; r < n3; ++r)
        for (Index k = 0; k < n3; ++k) {
            double c, s;
            detail::unit_root(r, k, n3, c, s);
            f(r, k) = std::complex<Real>(static_cast<Real>(c), static_cast<Real>(-s));
        }
    return f;
}

/// Forward transform of the half spectrum: slices f = 0 .. floor(n3/2).
/// Slice f of the result is the n1 x n2 complex matrix X_hat(:,:,f).
template <class Real>
std::vector<Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>>
dft_half(const Tensor3<Real>& x) {
    using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
    using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
    const Index n1 = x.n1(), n2 = x.n2(), n3 = x.n3();
    const Index h = half_spectrum_size(n3);

    RealMatrix fre(n3, h), fim(n3, h);
    for (Index k = 0; k < n3; ++k)
        for (Index f = 0; f < h; ++f) {
            double c, s;
            detail::unit_root(f, k, n3, c, s);
            fre(k, f) = static_cast<Real>(c);
            fim(k, f) = static_cast<Real>(-s);
        }

    RealMatrix re = x.tube_matrix() * fre;
    RealMatrix im = x.tube_matrix() * fim;

    std::vector<ComplexMatrix> slices(h);
    for (Index f = 0; f < h; ++f) {
        slices[f].resize(n1, n2);
        slices[f].real() = re.col(f).reshaped(n1, n2);
        slices[f].imag() = im.col(f).reshaped(n1, n2);
    }
    return slices;
}

/// Inverse transform from half-spectrum slices; the mirrored frequencies are
/// implied by conjugate symmetry, so the output is exactly real.
template <class Real>
Tensor3<Real> idft_half(
    const std::vector<Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>>& slices,
    Index n3) {
    using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
    const Index h = half_spectrum_size(n3);
    if (static_cast<Index>(slices.size()) != h)
        throw ShapeError("idft_half: expected " + std::to_string(h) + " slices, got " +
                         std::to_string(slices.size()));
    const Index n1 = slices[0].rows(), n2 = slices[0].cols();

    RealMatrix reh(n1 * n2, h), imh(n1 * n2, h);
    for (Index f = 0; f < h; ++f) {
        if (slices[f].rows() != n1 || slices[f].cols() != n2)
            throw ShapeError("idft_half: slice " + std::to_string(f) +
                             " has inconsistent dimensions");
        reh.col(f) = slices[f].real().reshaped();
        imh.col(f) = slices[f].imag().reshaped();
    }

    RealMatrix cre(h, n3), cim(h, n3);
    for (Index f = 0; f < h; ++f) {
        const Real w = static_cast<Real>(spectral_weight(f, n3)) / static_cast<Real>(n3);
        for (Index k = 0; k < n3; ++k) {
            double c, s;
            detail::unit_root(f, k, n3, c, s);
            cre(f, k) = w * static_cast<Real>(c);
            cim(f, k) = -w * static_cast<Real>(s);
        }
    }

    Tensor3<Real> x(n1, n2, n3);
    x.tube_matrix() = reh * cre + imh * cim;
    return x;
}

/// Complex tensor holding the DFT of a real tensor along its tubes.
/// Invariant: slice k and slice n3-k are conjugates (slice 0, and the Nyquist
/// slice for even n3, are real), which is what makes the inverse real.
template <class Real>
struct TransformTensor {
    Tensor3<std::complex<Real>> t;

    TransformTensor() = default;
    explicit TransformTensor(Tensor3<std::complex<Real>> tensor) : t(std::move(tensor)) {}

    Index n1() const { return t.n1(); }
    Index n2() const { return t.n2(); }
    Index n3() const { return t.n3(); }
    Dims3 dims() const { return t.dims(); }
    auto slice(Index k) { return t.slice(k); }
    auto slice(Index k) const { return t.slice(k); }
};

using TransformTensord = TransformTensor<double>;

/// Largest absolute deviation from conjugate symmetry, for diagnostics.
template <class Real>
Real conjugate_symmetry_defect(const TransformTensor<Real>& th) {
    const Index n3 = th.n3();
    Real defect = th.slice(0).imag().template lpNorm<Eigen::Infinity>();
    for (Index k = 1; 2 * k <= n3; ++k) {
        defect = std::max(defect, (th.slice(k) - th.slice(n3 - k).conjugate())
                                      .template lpNorm<Eigen::Infinity>());
    }
    return defect;
}

template <class Real>
TransformTensor<Real> dft_tubes(const Tensor3<Real>& x) {
    const Index n3 = x.n3();
    const Index h = half_spectrum_size(n3);
    auto half = dft_half(x);

    TransformTensor<Real> th(Tensor3<std::complex<Real>>(x.n1(), x.n2(), n3));
    for (Index f = 0; f < h; ++f) th.slice(f) = half[f];
    for (Index k = h; k < n3; ++k) th.slice(k) = half[n3 - k].conjugate();
    return th;
}

/// Inverse DFT along tubes.  Rejects inputs whose conjugate symmetry is
/// broken beyond rel_tol (relative to the largest entry), since those have no
/// real preimage.
template <class Real>
Tensor3<Real> idft_tubes(const TransformTensor<Real>& th, Real rel_tol = Real(1e-10)) {
    using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
    const Index n3 = th.n3();
    const Index h = half_spectrum_size(n3);

    const Real scale = th.t.as_vec().template lpNorm<Eigen::Infinity>();
    const Real defect = conjugate_symmetry_defect(th);
    if (defect > rel_tol * std::max(scale, Real(1)))
        throw NumericalError("idft_tubes: conjugate symmetry broken (defect " +
                             std::to_string(static_cast<double>(defect)) + ", scale " +
                             std::to_string(static_cast<double>(scale)) + ")");

    std::vector<ComplexMatrix> half(h);
    for (Index f = 0; f < h; ++f) half[f] = th.slice(f);
    return idft_half(half, n3);
}

}  // namespace tubal

#endif
