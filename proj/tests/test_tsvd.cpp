#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

#include "tubal/random.hpp"
#include "tubal/tensor.hpp"
#include "tubal/tprod.hpp"
#include "tubal/transform.hpp"
#include "tubal/tsvd.hpp"

using namespace tubal;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;

namespace {

Tensor3d random_tensor(Index n1, Index n2, Index n3, std::uint64_t seed) {
    RngEngine rng(seed);
    return gaussian_tensor(n1, n2, n3, rng);
}

Tensor3d random_lowrank(Index n1, Index n2, Index n3, Index r, std::uint64_t seed) {
    RngEngine rng(seed);
    Tensor3d a = gaussian_tensor(n1, r, n3, rng);
    Tensor3d b = gaussian_tensor(r, n2, n3, rng);
    return tprod(a, b);
}

// Full-spectrum Jacobi truncation, an independent oracle for stht.
Tensor3d stht_oracle(const Tensor3d& x, Index r) {
    auto th = dft_tubes(x);
    Tensor3<std::complex<double>> out(x.n1(), x.n2(), x.n3());
    for (Index k = 0; k < x.n3(); ++k) {
        Eigen::JacobiSVD<MatrixXcd> svd(th.slice(k),
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
        out.slice(k) = svd.matrixU().leftCols(r) *
                       svd.singularValues().head(r).asDiagonal() *
                       svd.matrixV().leftCols(r).adjoint();
    }
    return idft_tubes(TransformTensord(std::move(out)), 1e-8);
}

bool f_diagonal(const Tensor3d& s, double tol) {
    for (Index k = 0; k < s.n3(); ++k)
        for (Index j = 0; j < s.n2(); ++j)
            for (Index i = 0; i < s.n1(); ++i)
                if (i != j && std::abs(s(i, j, k)) > tol) return false;
    return true;
}

}  // namespace

TEST_CASE("tsvd reconstructs with orthogonal factors and f-diagonal core") {
    for (auto [n1, n2, n3] : {std::array<Index, 3>{6, 8, 5}, std::array<Index, 3>{8, 6, 4},
                              std::array<Index, 3>{5, 5, 3}}) {
        Tensor3d x = random_tensor(n1, n2, n3, 7 * n1 + n3);
        auto f = tsvd(x);
        CHECK((f.U.dims() == Dims3{n1, n1, n3}));
        CHECK((f.S.dims() == Dims3{n1, n2, n3}));
        CHECK((f.V.dims() == Dims3{n2, n2, n3}));
        CHECK(is_orthogonal(f.U));
        CHECK(is_orthogonal(f.V));
        CHECK(f_diagonal(f.S, 1e-10 * fro_norm(x)));

        Tensor3d rebuilt = tprod(tprod(f.U, f.S), ttranspose(f.V));
        CHECK(fro_norm(rebuilt - x) <= 1e-10 * fro_norm(x));

        // transform-domain diagonals are real, nonnegative, nonincreasing
        auto sh = dft_half(f.S);
        for (const auto& slice : sh) {
            auto d = slice.diagonal();
            CHECK(d.imag().norm() <= 1e-10 * fro_norm(x));
            for (Index i = 0; i + 1 < d.size(); ++i)
                CHECK(d(i).real() >= d(i + 1).real() - 1e-10 * fro_norm(x));
            CHECK(d(d.size() - 1).real() >= -1e-10 * fro_norm(x));
        }
    }
}

TEST_CASE("tsvd of the zero tensor") {
    Tensor3d z(4, 3, 5);
    auto f = tsvd(z);
    CHECK(is_orthogonal(f.U));
    CHECK(is_orthogonal(f.V));
    CHECK(fro_norm(f.S) == 0.0);
    CHECK(tubal_rank(z).tubal_rank == 0);
}

TEST_CASE("n3 = 1 reduces to the matrix SVD") {
    Tensor3d x = random_tensor(7, 5, 1, 99);
    auto f = tsvd(x);
    Eigen::JacobiSVD<MatrixXd> svd(x.slice(0));
    auto sv = svd.singularValues();
    for (Index i = 0; i < 5; ++i) CHECK(f.S(i, i, 0) == doctest::Approx(sv(i)).epsilon(1e-10));

    auto report = tubal_rank(x);
    CHECK(report.tubal_rank == 5);
    for (Index i = 0; i < 5; ++i)
        CHECK(report.tube_norms[i] == doctest::Approx(sv(i)).epsilon(1e-10));
}

TEST_CASE("tubal rank of structured tensors") {
    CHECK(tubal_rank(identity_tensor(5, 4)).tubal_rank == 5);

    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        Tensor3d x = random_lowrank(8, 7, 4, 2, seed);
        auto report = tubal_rank(x, 1e-8);
        CHECK(report.tubal_rank == 2);
        REQUIRE(report.tube_norms.size() == 7);
        CHECK(report.tube_norms[1] > report.zero_threshold);
        CHECK(report.tube_norms[2] <= report.zero_threshold);
    }

    Tensor3d x = random_tensor(4, 4, 3, 17);
    CHECK_THROWS_AS(tubal_rank(x, 0.0), ArgumentError);
    CHECK_THROWS_AS(tubal_rank(x, 1.5), ArgumentError);
}

TEST_CASE("tube norms come from Parseval over slice spectra") {
    Tensor3d x = random_tensor(5, 6, 4, 23);
    auto report = tubal_rank(x);

    auto th = dft_tubes(x);
    Eigen::VectorXd sq = Eigen::VectorXd::Zero(5);
    for (Index k = 0; k < 4; ++k) {
        Eigen::JacobiSVD<MatrixXcd> svd(th.slice(k));
        sq += svd.singularValues().array().square().matrix();
    }
    for (Index i = 0; i < 5; ++i)
        CHECK(report.tube_norms[i] == doctest::Approx(std::sqrt(sq(i) / 4.0)).epsilon(1e-10));
}

TEST_CASE("stht edge ranks") {
    Tensor3d x = random_tensor(5, 4, 3, 31);
    CHECK(fro_norm(stht(x, 0)) == 0.0);
    CHECK(fro_norm(stht(x, 4) - x) == 0.0);
    CHECK(fro_norm(stht(x, 9) - x) == 0.0);
    CHECK_THROWS_AS(stht(x, -1), ArgumentError);

    Tensor3d z(5, 4, 3);
    CHECK(fro_norm(stht(z, 2)) == 0.0);
}

TEST_CASE("stht matches the full-spectrum oracle") {
    for (auto [n1, n2, n3] : {std::array<Index, 3>{6, 5, 4}, std::array<Index, 3>{5, 8, 3},
                              std::array<Index, 3>{7, 7, 6}}) {
        Tensor3d x = random_tensor(n1, n2, n3, 100 + n3);
        for (Index r : {Index(1), Index(2), Index(3)}) {
            Tensor3d fast = stht(x, r);
            Tensor3d slow = stht_oracle(x, r);
            CHECK(fro_norm(fast - slow) <= 1e-11 * fro_norm(x));
        }
    }
}

TEST_CASE("stht is idempotent and monotone in rank") {
    Tensor3d x = random_tensor(7, 6, 5, 200);
    double prev = fro_norm(x);
    for (Index r = 1; r <= 5; ++r) {
        Tensor3d hr = stht(x, r);
        CHECK(fro_norm(stht(hr, r) - hr) <= 1e-11 * fro_norm(x));
        CHECK(tubal_rank(hr, 1e-8).tubal_rank <= static_cast<int>(r));
        const double res = fro_norm(x - hr);
        CHECK(res <= prev + 1e-12);
        prev = res;
    }
    CHECK(fro_norm(stht(x, 1, false) - stht(x, 1, true)) <= 1e-11 * fro_norm(x));
}

TEST_CASE("stht beats random candidates of the same rank") {
    Tensor3d x = random_tensor(6, 6, 4, 300);
    for (Index r : {Index(1), Index(2)}) {
        const double best = fro_norm(x - stht(x, r));
        for (std::uint64_t s = 0; s < 50; ++s) {
            Tensor3d y = random_lowrank(6, 6, 4, r, 1000 + s);
            y *= fro_norm(x) / fro_norm(y);
            CHECK(best <= fro_norm(x - y) + 1e-10 * fro_norm(x));
        }
    }
}

TEST_CASE("reduced_tsvd factors multiply back to the thresholded tensor") {
    Tensor3d x = random_tensor(8, 6, 5, 400);
    for (Index r : {Index(1), Index(3), Index(6)}) {
        auto f = reduced_tsvd(x, r);
        CHECK((f.U.dims() == Dims3{8, r, 5}));
        CHECK((f.S.dims() == Dims3{r, r, 5}));
        CHECK((f.V.dims() == Dims3{6, r, 5}));
        Tensor3d rebuilt = tprod(tprod(f.U, f.S), ttranspose(f.V));
        CHECK(fro_norm(rebuilt - stht(x, r)) <= 1e-10 * fro_norm(x));
    }
    CHECK_THROWS_AS(reduced_tsvd(x, 0), ArgumentError);
    CHECK_THROWS_AS(reduced_tsvd(x, 7), ArgumentError);
}

TEST_CASE("slice svd stays sound on quantized image slices") {
    // Quantizing a rank-2 board to the 1/255 grid produces slices that are
    // known to break the divide-and-conquer kernel; the guarded path must
    // still return a genuine factorization.
    Tensor3d x(96, 96, 3);
    RngEngine rng(5);
    std::uniform_real_distribution<double> unit(0.1, 0.9);
    const double a = unit(rng), b = unit(rng), c = unit(rng);
    for (Index k = 0; k < 3; ++k) {
        const double bright = k == 0 ? a : (k == 1 ? b : c);
        const double dark = 0.5 * bright;
        for (Index j = 0; j < 96; ++j)
            for (Index i = 0; i < 96; ++i) {
                const bool on = ((i / 12) + (j / 12)) % 2 == 0;
                const double v = on ? bright : dark;
                x(i, j, k) = std::round(v * 255.0) / 255.0;
            }
    }

    auto xh = dft_half(x);
    for (Index f = 0; f < static_cast<Index>(xh.size()); ++f) {
        auto svd = detail::slice_svd<double>(
            xh[f], Eigen::ComputeThinU | Eigen::ComputeThinV, f);
        const Index k = svd.svals.size();
        REQUIRE(k == 96);
        CHECK(svd.svals.allFinite());
        for (Index i = 0; i + 1 < k; ++i) CHECK(svd.svals(i) >= svd.svals(i + 1));
        CHECK((svd.U.adjoint() * svd.U - MatrixXcd::Identity(k, k)).norm() <= 1e-8);
        CHECK((svd.V.adjoint() * svd.V - MatrixXcd::Identity(k, k)).norm() <= 1e-8);
        const MatrixXcd rebuilt = svd.U * svd.svals.asDiagonal() * svd.V.adjoint();
        CHECK((rebuilt - xh[f]).norm() <= 1e-9 * xh[f].norm());
    }

    Tensor3d hr = stht(x, 2);
    CHECK(hr.allFinite());
    CHECK(fro_norm(x - hr) <= 0.05 * fro_norm(x));
}
