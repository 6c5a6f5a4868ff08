#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "reachmax/error.hpp"

namespace reachmax {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

namespace linalg {

inline constexpr double tol_recon = 1e-9;
inline constexpr double tol_diag = 1e-10;
inline constexpr double tol_rho = 1e-12;
inline constexpr double tol_hermitian = 1e-9;

/// A = U diag(D) U^-1 with eigenvalues sorted by decreasing modulus.
struct SpectralDecomposition {
    ComplexMatrix U;
    ComplexVector D;
    ComplexMatrix U_inv;
    double rho = 0.0;

    [[nodiscard]] Eigen::Index dim() const noexcept { return D.size(); }
};

template <typename Derived>
double inf_norm(const Eigen::MatrixBase<Derived>& M) {
    if (M.size() == 0) return 0.0;
    return M.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Eigendecomposition of a real square matrix. Eigenvector columns have unit
/// 2-norm and their largest-modulus entry is real positive.
inline SpectralDecomposition eig_decompose(const Matrix& A) {
    if (A.rows() != A.cols() || A.rows() == 0) {
        throw Error(Errc::NonSquare, "expected a non-empty square matrix, got " +
                                         std::to_string(A.rows()) + "x" + std::to_string(A.cols()));
    }
    if (!A.allFinite()) throw Error(Errc::InvalidInput, "matrix has non-finite entries");

    const Eigen::Index n = A.rows();
    Eigen::EigenSolver<Matrix> solver(A, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) {
        throw Error(Errc::NotDiagonalizable, "eigenvalue iteration did not converge");
    }
    const ComplexVector values = solver.eigenvalues();
    const ComplexMatrix vectors = solver.eigenvectors();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const Complex& x = values(a);
        const Complex& y = values(b);
        const double ax = std::abs(x), ay = std::abs(y);
        if (ax != ay) return ax > ay;
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() > y.imag();
    });

    SpectralDecomposition dec;
    dec.U.resize(n, n);
    dec.D.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto src = order[static_cast<std::size_t>(j)];
        dec.D(j) = values(src);
        ComplexVector col = vectors.col(src);
        const double norm = col.norm();
        if (norm == 0.0) throw Error(Errc::NotDiagonalizable, "zero eigenvector");
        col /= norm;
        Eigen::Index pivot = 0;
        col.cwiseAbs().maxCoeff(&pivot);
        col *= std::conj(col(pivot)) / std::abs(col(pivot));
        col(pivot) = Complex(col(pivot).real(), 0.0);
        dec.U.col(j) = col;
    }

    Eigen::JacobiSVD<ComplexMatrix> svd(dec.U);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (!(smin > 0.0) || sv(0) / smin > 1.0 / tol_diag) {
        throw Error(Errc::NotDiagonalizable, "eigenvector matrix is numerically singular");
    }
    dec.U_inv = dec.U.fullPivLu().inverse();
    dec.rho = dec.D.cwiseAbs().maxCoeff();

    const ComplexMatrix recon = dec.U * dec.D.asDiagonal() * dec.U_inv;
    const double scale = 1.0 + inf_norm(A);
    if (inf_norm(recon - A.cast<Complex>()) > tol_recon * scale ||
        inf_norm(dec.U * dec.U_inv - ComplexMatrix::Identity(n, n)) > tol_recon) {
        throw Error(Errc::NotDiagonalizable, "reconstruction check failed");
    }
    return dec;
}

/// Assumption rho(A) < 1, with a 1e-12 margin.
inline bool spectral_radius_check(const SpectralDecomposition& dec) noexcept {
    return dec.rho < 1.0 - tol_rho;
}

inline bool is_hermitian(const ComplexMatrix& B, double tol = tol_hermitian) {
    if (B.rows() != B.cols()) return false;
    return inf_norm(B - B.adjoint()) <= tol * (1.0 + inf_norm(B));
}

/// Largest eigenvalue of a Hermitian matrix.
inline double hermitian_lambda_max(const ComplexMatrix& B) {
    if (B.rows() != B.cols() || B.rows() == 0) throw Error(Errc::NonSquare, "hermitian_lambda_max");
    if (!is_hermitian(B)) throw Error(Errc::NotHermitian, "matrix is not Hermitian within 1e-9");
    const ComplexMatrix sym = 0.5 * (B + B.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().maxCoeff();
}

/// (U U^*)^-1 = U^-* U^-1, symmetrized.
inline ComplexMatrix gram_inverse(const ComplexMatrix& U) {
    if (U.rows() != U.cols() || U.rows() == 0) throw Error(Errc::NonSquare, "gram_inverse");
    Eigen::FullPivLU<ComplexMatrix> lu(U);
    if (!lu.isInvertible()) throw Error(Errc::Singular, "eigenvector matrix is singular");
    const ComplexMatrix inv = lu.inverse();
    const ComplexMatrix gram = inv.adjoint() * inv;
    return 0.5 * (gram + gram.adjoint());
}

/// P_{k+1} = A P_k.
template <typename DerivedP, typename DerivedA>
auto matrix_power_step(const Eigen::MatrixBase<DerivedP>& P, const Eigen::MatrixBase<DerivedA>& A) {
    using Scalar = typename Eigen::ScalarBinaryOpTraits<typename DerivedA::Scalar,
                                                        typename DerivedP::Scalar>::ReturnType;
    return Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>(A * P);
}

/// Extreme eigenvalues of a real symmetric matrix (symmetrized first).
struct SymmetricSpectrum {
    double min = 0.0;
    double max = 0.0;
};

inline SymmetricSpectrum symmetric_extremes(const Matrix& S) {
    const Matrix sym = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
    return {solver.eigenvalues().minCoeff(), solver.eigenvalues().maxCoeff()};
}

} // namespace linalg
} // namespace reachmax
