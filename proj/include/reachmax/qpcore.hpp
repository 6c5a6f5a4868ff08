#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "reachmax/error.hpp"
#include "reachmax/geometry.hpp"
#include "reachmax/linalg.hpp"

namespace reachmax {
namespace qp {

inline constexpr double tol_psd = 1e-9;
inline constexpr double tol_nd = 1e-9;

/// x -> x^T Q x + q^T x + c, with Q kept symmetric.
struct QuadraticObjective {
    Matrix Q;
    Vector q;
    double c = 0.0;

    QuadraticObjective() = default;
    QuadraticObjective(const Matrix& Qmat, Vector qvec, double constant = 0.0)
        : Q(0.5 * (Qmat + Qmat.transpose())), q(std::move(qvec)), c(constant) {
        if (Qmat.rows() != Qmat.cols() || Qmat.rows() != q.size()) {
            throw Error(Errc::DimensionMismatch, "objective matrix and vector sizes disagree");
        }
        if (linalg::inf_norm(Qmat - Qmat.transpose()) > 1e-9 * (1.0 + linalg::inf_norm(Qmat))) {
            throw Error(Errc::InvalidInput, "objective matrix is not symmetric");
        }
    }

    [[nodiscard]] Eigen::Index dim() const noexcept { return q.size(); }
    [[nodiscard]] double value(const Vector& x) const { return x.dot(Q * x) + q.dot(x) + c; }
};

enum class ObjectiveClass { ConvexPSD, StrictlyConcaveND, Unsupported };

inline constexpr const char* to_string(ObjectiveClass c) noexcept {
    switch (c) {
    case ObjectiveClass::ConvexPSD: return "ConvexPSD";
    case ObjectiveClass::StrictlyConcaveND: return "StrictlyConcaveND";
    case ObjectiveClass::Unsupported: return "Unsupported";
    }
    return "?";
}

/// Q = 0 and NSD-with-zero-lambda_max fall under Unsupported: the largest
/// eigenvalue of Q must be nonzero.
inline ObjectiveClass classify(const QuadraticObjective& obj) {
    const auto ext = linalg::symmetric_extremes(obj.Q);
    if (ext.min >= -tol_psd && ext.max > tol_psd) return ObjectiveClass::ConvexPSD;
    if (ext.max <= -tol_nd) return ObjectiveClass::StrictlyConcaveND;
    return ObjectiveClass::Unsupported;
}

/// f_k(x) = (A^k x)^T Q (A^k x) + q^T A^k x + c, with A^k cached so that the
/// next rank costs one matrix product.
class SteppedObjective {
public:
    SteppedObjective(QuadraticObjective base, Matrix A)
        : base_(std::move(base)), A_(std::move(A)), power_(Matrix::Identity(A_.rows(), A_.cols())) {
        if (A_.rows() != A_.cols() || A_.rows() != base_.dim()) {
            throw Error(Errc::DimensionMismatch, "system matrix and objective sizes disagree");
        }
    }

    SteppedObjective(QuadraticObjective base, Matrix A, std::size_t k) : SteppedObjective(std::move(base), std::move(A)) {
        for (std::size_t i = 0; i < k; ++i) step_next();
    }

    void step_next() {
        power_ = linalg::matrix_power_step(power_, A_);
        ++k_;
    }

    [[nodiscard]] std::size_t rank() const noexcept { return k_; }
    [[nodiscard]] const Matrix& power() const noexcept { return power_; }
    [[nodiscard]] const QuadraticObjective& base() const noexcept { return base_; }
    [[nodiscard]] const Matrix& system() const noexcept { return A_; }

    [[nodiscard]] double value(const Vector& x) const {
        const Vector y = power_ * x;
        return y.dot(base_.Q * y) + base_.q.dot(y) + base_.c;
    }

    /// The same function written as a quadratic in x.
    [[nodiscard]] QuadraticObjective expanded() const {
        const Matrix Qk = power_.transpose() * base_.Q * power_;
        return QuadraticObjective(0.5 * (Qk + Qk.transpose()), power_.transpose() * base_.q, base_.c);
    }

private:
    QuadraticObjective base_;
    Matrix A_;
    Matrix power_;
    std::size_t k_ = 0;
};

struct Maximum {
    double value = -std::numeric_limits<double>::infinity();
    Vector argmax;
};

/// Maximum of a convex stepped objective over a finite vertex list; ties go to
/// the earliest vertex.
inline Maximum maximize_convex_vertices(const SteppedObjective& f, const geometry::VertexList& V) {
    if (V.size() == 0) throw Error(Errc::EmptyVertexList, "no vertices to evaluate");
    if (V.dim() != f.base().dim()) throw Error(Errc::DimensionMismatch, "vertex dimension");
    const Matrix Y = f.power() * V.points;
    const Eigen::RowVectorXd values =
        (Y.array() * (f.base().Q * Y).array()).colwise().sum() + (f.base().q.transpose() * Y).array();

    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < values.size(); ++i) {
        if (values(i) > values(best)) best = i;
    }
    return {values(best) + f.base().c, V.points.col(best)};
}

struct BarrierOptions {
    double gap_tol = 1e-10;      // stop once m / t falls below this
    double barrier_factor = 10.0;
    double newton_tol = 1e-12;   // half squared Newton decrement per centering
    int max_newton = 200;
};

namespace detail {

// Minimize 1/2 x^T H x + g^T x subject to lo < x < hi (all strict), H PSD,
// via the logarithmic barrier with a geometric schedule.
inline Vector barrier_box_minimize(const Matrix& H, const Vector& g, const Vector& lo, const Vector& hi,
                                   const BarrierOptions& opt) {
    const Eigen::Index n = g.size();
    const double m = 2.0 * static_cast<double>(n);
    Vector x = 0.5 * (lo + hi);

    auto phi = [&](const Vector& z, double t) {
        const Vector a = z - lo, b = hi - z;
        return t * (0.5 * z.dot(H * z) + g.dot(z)) - a.array().log().sum() - b.array().log().sum();
    };

    for (double t = 1.0;; t *= opt.barrier_factor) {
        for (int it = 0; it < opt.max_newton; ++it) {
            const Vector a = x - lo, b = hi - x;
            const Vector grad = t * (H * x + g) - a.cwiseInverse() + b.cwiseInverse();
            Matrix hess = t * H;
            hess.diagonal() += a.cwiseInverse().cwiseAbs2() + b.cwiseInverse().cwiseAbs2();
            const Eigen::LDLT<Matrix> ldlt(hess);
            const Vector dx = -ldlt.solve(grad);
            const double decrement = -grad.dot(dx);
            if (!(decrement > 2.0 * opt.newton_tol)) break;

            double step = 1.0;
            // stay strictly inside
            for (Eigen::Index i = 0; i < n; ++i) {
                if (dx(i) < 0.0) step = std::min(step, 0.99 * a(i) / -dx(i));
                else if (dx(i) > 0.0) step = std::min(step, 0.99 * b(i) / dx(i));
            }
            const double f0 = phi(x, t);
            while (step > 1e-16) {
                const Vector trial = x + step * dx;
                const double f1 = phi(trial, t);
                if (std::isfinite(f1) && f1 <= f0 - 0.25 * step * decrement) break;
                step *= 0.5;
            }
            if (step <= 1e-16) break;
            x += step * dx;
        }
        if (m / t < opt.gap_tol) break;
    }
    return x;
}

} // namespace detail

/// Maximum of a concave stepped objective over a box, by interior-point
/// minimization of -f. Fixed coordinates (lower == upper) are substituted out.
inline Maximum maximize_concave_qp(const SteppedObjective& f, const geometry::Polytope& P,
                                   const BarrierOptions& opt = {}) {
    if (P.dim() != f.base().dim()) throw Error(Errc::DimensionMismatch, "polytope dimension");
    if (!P.is_box()) {
        throw Error(Errc::UnsupportedSet, "the concave solver needs a box (H-representation)");
    }
    const auto expanded = f.expanded();
    if (linalg::symmetric_extremes(expanded.Q).max > tol_nd * (1.0 + linalg::inf_norm(expanded.Q))) {
        throw Error(Errc::NotConcave, "objective is not concave");
    }
    const auto& box = P.as_box();
    const Eigen::Index d = box.lower.size();

    std::vector<Eigen::Index> free;
    Vector x = box.lower;
    for (Eigen::Index i = 0; i < d; ++i) {
        if (box.lower(i) < box.upper(i)) free.push_back(i);
    }
    if (!free.empty()) {
        const auto nf = static_cast<Eigen::Index>(free.size());
        // -f(x) = 1/2 x^T H x + g^T x + const with H = -2 Q_k, g = -q_k.
        const Matrix H = -2.0 * expanded.Q;
        const Vector g = -expanded.q;
        Matrix Hff(nf, nf);
        Vector gf(nf), lo(nf), hi(nf);
        for (Eigen::Index r = 0; r < nf; ++r) {
            const auto i = free[static_cast<std::size_t>(r)];
            gf(r) = g(i);
            lo(r) = box.lower(i);
            hi(r) = box.upper(i);
            for (Eigen::Index c = 0; c < nf; ++c) Hff(r, c) = H(i, free[static_cast<std::size_t>(c)]);
        }
        // Coupling with the fixed coordinates enters the linear term.
        for (Eigen::Index r = 0; r < nf; ++r) {
            const auto i = free[static_cast<std::size_t>(r)];
            for (Eigen::Index j = 0; j < d; ++j) {
                if (box.lower(j) == box.upper(j)) gf(r) += H(i, j) * box.lower(j);
            }
        }
        const Vector xf = detail::barrier_box_minimize(Hff, gf, lo, hi, opt);
        for (Eigen::Index r = 0; r < nf; ++r) x(free[static_cast<std::size_t>(r)]) = xf(r);
    }
    return {expanded.value(x), x};
}

} // namespace qp
} // namespace reachmax
