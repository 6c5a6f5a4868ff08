#pragma once

#include <cmath>
#include <cstdint>

#include "reachmax/error.hpp"
#include "reachmax/geometry.hpp"
#include "reachmax/linalg.hpp"

namespace reachmax {
namespace bounds {

/// Spectral quantities behind the rank bound. For every k > 0,
///
///   nu_k <= (rho^k sqrt(lmax_abs * mu_gram) + v_diag)^2 - v_diag^2 <= envelope
///
/// where lmax_abs = |lambda_max(U^* Q U)|, mu_gram = max over the working set
/// of x^T (U U^*)^-1 x and v_diag = ||U^* q|| / (2 sqrt(lmax_abs)).
struct SpectralData {
    linalg::SpectralDecomposition dec;
    double mu_gram = 0.0;
    double lmax_abs = 0.0;
    double v_diag = 0.0;
    double envelope = 0.0;

    [[nodiscard]] double rho() const noexcept { return dec.rho; }
    /// sqrt(lmax_abs * mu_gram)
    [[nodiscard]] double scale() const { return std::sqrt(lmax_abs * mu_gram); }
    /// The rank-k form of the bound.
    [[nodiscard]] double bound_at(std::size_t k) const {
        const double r = std::pow(rho(), static_cast<double>(k)) * scale() + v_diag;
        return r * r - v_diag * v_diag;
    }
};

inline SpectralData build_spectral_data(const linalg::SpectralDecomposition& dec, const Matrix& Q,
                                        const Vector& q, const geometry::Polytope& working_set) {
    const auto d = dec.dim();
    if (Q.rows() != d || Q.cols() != d || q.size() != d || working_set.dim() != d) {
        throw Error(Errc::DimensionMismatch, "spectral data inputs disagree in dimension");
    }
    SpectralData sd;
    sd.dec = dec;
    const ComplexMatrix Qc = Q.cast<Complex>();
    const ComplexMatrix UQU = dec.U.adjoint() * Qc * dec.U;
    sd.lmax_abs = std::abs(linalg::hermitian_lambda_max(0.5 * (UQU + UQU.adjoint())));
    if (sd.lmax_abs <= 1e-12) {
        throw Error(Errc::AssumptionViolated, "largest eigenvalue of U^* Q U is zero");
    }
    sd.mu_gram = geometry::mu(linalg::gram_inverse(dec.U), working_set);
    sd.v_diag = (dec.U.adjoint() * q.cast<Complex>()).norm() / (2.0 * std::sqrt(sd.lmax_abs));
    const double root = sd.scale() + sd.v_diag;
    sd.envelope = root * root - sd.v_diag * sd.v_diag;
    return sd;
}

/// nu_0 >= envelope means nu_0 is already the supremum.
inline bool corollary_one_holds(const SpectralData& sd, double nu0) noexcept { return nu0 >= sd.envelope; }

/// Smallest-guaranteed stopping rank: for every k >= k_diag(nu_j), nu_k <= nu_j.
///
///   K = floor( ln( (sqrt(nu_j + V^2) - V) / sqrt(lmax_abs mu_gram) ) / ln rho ) + 1
inline std::size_t k_diag(const SpectralData& sd, double nu_j) {
    if (!(nu_j > 0.0)) throw Error(Errc::NonPositiveNu, "stopping rank needs a positive term");
    const double rho = sd.rho();
    if (rho == 0.0) return 1;
    const double V = sd.v_diag;
    // sqrt(nu + V^2) - V without cancellation
    const double numerator = nu_j / (std::sqrt(nu_j + V * V) + V);
    const double ratio = std::min(numerator / sd.scale(), 1.0);
    const double exponent = std::floor(std::log(ratio) / std::log(rho));
    if (!std::isfinite(exponent) || exponent > 9.0e15) {
        throw Error(Errc::AssumptionViolated, "stopping rank overflows");
    }
    return static_cast<std::size_t>(exponent) + 1;
}

} // namespace bounds
} // namespace reachmax
