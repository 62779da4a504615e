#ifndef TUBAL_GENERATORS_HPP
#define TUBAL_GENERATORS_HPP

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tubal/errors.hpp"
#include "tubal/image.hpp"
#include "tubal/measurement.hpp"
#include "tubal/random.hpp"
#include "tubal/tensor.hpp"
#include "tubal/tprod.hpp"
#include "tubal/tsvd.hpp"

// Seeded generators for ground truths, sensing ensembles and synthetic test
// images.  Every generated tensor is rank-checked before it is handed out;
// nothing is assumed about constructions that could degenerate.

namespace tubal {

/// Gaussian tubal-rank-r ground truth X = X1 * X2 with X1: n1 x r x n3 and
/// X2: r x n2 x n3.  The rank is verified at rel_tol 1e-8.
inline Tensor3d gen_lowrank(Index n1, Index n2, Index n3, Index r, std::uint64_t seed) {
    if (r < 1 || r > std::min(n1, n2))
        throw ArgumentError("gen_lowrank: rank " + std::to_string(r) +
                            " out of range for dims " + dims_str({n1, n2, n3}));
    RngEngine rng(seed);
    const Tensor3d x1 = gaussian_tensor(n1, r, n3, rng);
    const Tensor3d x2 = gaussian_tensor(r, n2, n3, rng);
    Tensor3d x = tprod(x1, x2);
    const auto report = tubal_rank(x, 1e-8);
    if (report.tubal_rank != static_cast<int>(r))
        throw NumericalError("gen_lowrank: generated tensor has tubal rank " +
                             std::to_string(report.tubal_rank) + ", wanted " +
                             std::to_string(r));
    return x;
}

/// Dense sensing ensemble: M tensors with i.i.d. N(0,1) entries.
inline MeasurementOp gen_gaussian_op(Index m, const Dims3& dims, std::uint64_t seed) {
    if (m < 1) throw ArgumentError("gen_gaussian_op: need M >= 1");
    RngEngine rng(seed);
    RowMatrixXd a(m, dim_product(dims));
    fill_gaussian(a, rng);
    return MeasurementOp::dense(std::move(a), dims);
}

namespace detail {

// Channel intensities in [lo, hi] with distinct channels and per-channel
// separation from previously drawn colors, so rank checks cannot collapse.
inline std::array<double, 3> draw_color(RngEngine& rng, double lo, double hi,
                                        const std::vector<std::array<double, 3>>& taken,
                                        double cross_gap) {
    std::uniform_real_distribution<double> unit(lo, hi);
    for (int attempt = 0; attempt < 4096; ++attempt) {
        std::array<double, 3> c = {unit(rng), unit(rng), unit(rng)};
        const bool channels_distinct = std::abs(c[0] - c[1]) >= 0.05 &&
                                       std::abs(c[1] - c[2]) >= 0.05 &&
                                       std::abs(c[0] - c[2]) >= 0.05;
        if (!channels_distinct) continue;
        bool separated = true;
        for (const auto& o : taken)
            for (int k = 0; k < 3; ++k)
                if (std::abs(c[k] - o[k]) < cross_gap) separated = false;
        if (separated) return c;
    }
    throw NumericalError("color draw failed to separate after 4096 attempts");
}

// The synthetic images are sums of r tube outer products with a fixed factor
// matrix U, so each transform slice is U * diag(coeffs) * U^T and its singular
// values equal those of R * diag(coeffs) * R^T where U = QR.  That gives the
// exact slice spectrum from an r x r problem.
inline Eigen::VectorXd reduced_slice_svals(const Eigen::MatrixXcd& r_factor,
                                           const Eigen::VectorXcd& coeffs) {
    const Eigen::MatrixXcd m =
        r_factor * coeffs.asDiagonal() * r_factor.transpose();
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues();
}

// exp(-2*pi*i*m/n3), the dft_matrix convention, for any integer exponent.
inline std::complex<double> croot(Index m, Index n3) {
    double c, s;
    unit_root(((m % n3) + n3) % n3, 1, n3, c, s);
    return {c, -s};
}

// DFT of a length-3 tube at frequency f.
inline std::complex<double> tube_dft3(const std::array<double, 3>& t, Index f) {
    std::complex<double> acc = 0.0;
    for (Index k = 0; k < 3; ++k) acc += t[k] * croot(f * k, 3);
    return acc;
}

// How fast singular tube thresholding fills a masked hole in these images is
// governed by the spread of each transform slice's spectrum: slices with a
// vanishing trailing singular value leave the hole dark essentially forever,
// while a flat spectrum fills it in a handful of iterations.  The generators
// therefore reject palettes until every content slice lands in the band the
// caller asks for.
struct SpectrumBand {
    double trailing_min;
    double trailing_max = 1.0;
    double second_max = 1.0;

    bool admits(const Eigen::VectorXd& svals) const {
        const Index last = svals.size() - 1;
        const double s1 = svals(0);
        if (!(s1 > 0.0)) return false;
        if (svals(last) < trailing_min * s1 || svals(last) > trailing_max * s1) return false;
        return svals.size() < 3 || svals(1) <= second_max * s1;
    }
};

}  // namespace detail

/// Two-color checkerboard of size n x n x 3 with cell x cell squares, built
/// as a t-product of an indicator factor and a color factor so its tubal rank
/// is exactly 2 (verified; degenerate color draws are rejected and redrawn).
/// One bright and one dark color, with every transform slice's spectrum kept
/// flat enough (sigma2/sigma1 >= 0.45) that masked recovery contracts fast.
inline ImageTensor make_checkerboard(Index n, Index cell, std::uint64_t seed_colors) {
    if (cell < 1 || n % cell != 0)
        throw ArgumentError("make_checkerboard: cell must divide n, got n = " +
                            std::to_string(n) + ", cell = " + std::to_string(cell));
    RngEngine rng(seed_colors);

    Eigen::MatrixXcd factor(n, 2);
    for (Index i = 0; i < n; ++i) {
        factor(i, 0) = 1.0;
        factor(i, 1) = (i / cell) % 2 == 0 ? 1.0 : -1.0;
    }
    const Eigen::MatrixXcd r_factor = Eigen::HouseholderQR<Eigen::MatrixXcd>(factor)
                                          .matrixQR()
                                          .topRows(2)
                                          .triangularView<Eigen::Upper>();
    const detail::SpectrumBand band{0.45};

    for (int attempt = 0; attempt < 4096; ++attempt) {
        const auto bright = detail::draw_color(rng, 0.55, 0.9, {}, 0.0);
        const auto dark = detail::draw_color(rng, 0.1, 0.45, {}, 0.0);

        std::array<double, 3> mean, diff;
        for (int k = 0; k < 3; ++k) {
            mean[k] = 0.5 * (bright[k] + dark[k]);
            diff[k] = 0.5 * (bright[k] - dark[k]);
        }
        bool balanced = true;
        for (Index f = 0; f < half_spectrum_size(3) && balanced; ++f) {
            Eigen::VectorXcd coeffs(2);
            coeffs << detail::tube_dft3(mean, f), detail::tube_dft3(diff, f);
            balanced = band.admits(detail::reduced_slice_svals(r_factor, coeffs));
        }
        if (!balanced) continue;

        Tensor3d u(n, 2, 3), v(2, n, 3);
        for (Index i = 0; i < n; ++i) {
            const double ui = static_cast<double>((i / cell) % 2);
            u(i, 0, 0) = ui;
            u(i, 1, 0) = 1.0 - ui;
        }
        for (Index j = 0; j < n; ++j) {
            const double vj = static_cast<double>((j / cell) % 2);
            for (Index k = 0; k < 3; ++k) {
                v(0, j, k) = vj * bright[k] + (1.0 - vj) * dark[k];
                v(1, j, k) = vj * dark[k] + (1.0 - vj) * bright[k];
            }
        }
        Tensor3d x = tprod(u, v);
        if (tubal_rank(x, 1e-8).tubal_rank != 2) continue;

        ImageTensor img;
        img.tensor = std::move(x);
        img.provenance = "checkerboard(n=" + std::to_string(n) + ",cell=" +
                         std::to_string(cell) + ",seed=" + std::to_string(seed_colors) + ")";
        return img;
    }
    throw NumericalError("make_checkerboard: balanced rank-2 palette search exhausted");
}

/// Synthetic facade stand-in: an n x n x 3 plaid of two crossing square-wave
/// stripe systems, widths band_px and 2*band_px, over a flat base. Channel k
/// is mean[k] * (1 + alpha*A + beta*B) with A, B the two stripe patterns.
/// The three patterns are mutually orthogonal and the channel tubes
/// proportional, so the tubal rank is exactly 3 and every transform slice
/// shares the singular-value ratios (1, alpha, beta). Under the centered-box
/// occlusion this profile recovers reliably but needs several hundred
/// iterations, an order of magnitude beyond the checkerboard.
inline ImageTensor make_striped_facade(Index n, Index band_px, std::uint64_t seed_colors) {
    if (band_px < 1 || n % (4 * band_px) != 0)
        throw ArgumentError(
            "make_striped_facade: need band >= 1 and n divisible by 4*band, got n = " +
            std::to_string(n) + ", band = " + std::to_string(band_px));
    RngEngine rng(seed_colors);
    std::uniform_real_distribution<double> alpha_dist(0.32, 0.38);
    std::uniform_real_distribution<double> beta_dist(0.22, 0.27);
    std::uniform_real_distribution<double> mean_dist(0.45, 0.60);
    const double alpha = alpha_dist(rng);
    const double beta = beta_dist(rng);

    const auto wave = [](Index i, Index width) {
        return (i / width) % 2 == 0 ? 1.0 : -1.0;
    };

    for (int attempt = 0; attempt < 200000; ++attempt) {
        std::array<double, 3> mean;
        for (auto& m : mean) m = mean_dist(rng);
        // near-equal channels would drop slices 1 and 2 below rank 3
        if (std::abs(detail::tube_dft3(mean, 1)) < 0.02) continue;

        Tensor3d x(n, n, 3);
        for (Index k = 0; k < 3; ++k)
            for (Index j = 0; j < n; ++j) {
                const double bj = wave(j, band_px), dj = wave(j, 2 * band_px);
                for (Index i = 0; i < n; ++i) {
                    const double a = wave(i, band_px) * dj;
                    const double b = wave(i, 2 * band_px) * bj;
                    x(i, j, k) = mean[k] * (1.0 + alpha * a + beta * b);
                }
            }
        if (tubal_rank(x, 1e-8).tubal_rank != 3) continue;

        ImageTensor img;
        img.tensor = std::move(x);
        img.provenance = "striped_facade(n=" + std::to_string(n) + ",band=" +
                         std::to_string(band_px) + ",seed=" + std::to_string(seed_colors) + ")";
        return img;
    }
    throw NumericalError("make_striped_facade: rank-3 palette search exhausted");
}

/// Mask op observing everything outside a centered w x h box (w rows, h
/// columns, all channels), plus the observed values of the image.
struct OccludedImage {
    MeasurementOp mask;
    Eigen::VectorXd observed;
};

inline OccludedImage occlude_center(const ImageTensor& img, Index w, Index h) {
    const Index n1 = img.tensor.n1(), n2 = img.tensor.n2(), n3 = img.tensor.n3();
    if (w < 0 || w > n1 || h < 0 || h > n2)
        throw ArgumentError("occlude_center: box " + std::to_string(w) + "x" +
                            std::to_string(h) + " does not fit in " + dims_str(img.tensor.dims()));
    if (w == n1 && h == n2)
        throw ArgumentError("occlude_center: box covers the whole image, nothing observed");
    const Index oi = (n1 - w) / 2, oj = (n2 - h) / 2;

    std::vector<Index> omega;
    omega.reserve(n1 * n2 * n3 - w * h * n3);
    for (Index k = 0; k < n3; ++k)
        for (Index j = 0; j < n2; ++j)
            for (Index i = 0; i < n1; ++i) {
                const bool hidden = i >= oi && i < oi + w && j >= oj && j < oj + h;
                if (!hidden) omega.push_back(linear_index(i, j, k, img.tensor.dims()));
            }

    OccludedImage out{MeasurementOp::mask(std::move(omega), img.tensor.dims()), {}};
    out.observed = apply(out.mask, img.tensor);
    return out;
}

}  // namespace tubal

#endif
