#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "reachmax/bounds.hpp"
#include "reachmax/error.hpp"
#include "reachmax/geometry.hpp"
#include "reachmax/linalg.hpp"
#include "reachmax/qpcore.hpp"

namespace reachmax {

inline constexpr std::size_t default_positivity_cap = 100;

/// sup over k and x0 in Xin of x_k^T Q x_k + q^T x_k, x_{k+1} = A x_k + b.
struct ProblemInstance {
    Matrix A;
    Vector b;
    Matrix Q;
    Vector q;
    geometry::Polytope Xin = geometry::Polytope::box(Vector::Zero(1), Vector::Zero(1));
    std::size_t N = default_positivity_cap;

    [[nodiscard]] Eigen::Index dim() const noexcept { return A.rows(); }
};

/// The instance rewritten around the fixed point b~ = (I - A)^-1 b:
/// y = x - b~ follows y_{k+1} = A y_k and the objective becomes
/// y^T Q y + (2 Q b~ + q)^T y + offset.
struct ReducedInstance {
    Matrix A;
    Matrix Q;
    Vector q;
    geometry::Polytope Xwork = geometry::Polytope::box(Vector::Zero(1), Vector::Zero(1));
    double offset = 0.0;
    Vector b_tilde;
};

enum class SolveStatus { Failed, CorollaryOne, KDiag };

constexpr std::string_view to_string(SolveStatus s) noexcept {
    switch (s) {
    case SolveStatus::Failed: return "Failed";
    case SolveStatus::CorollaryOne: return "CorollaryOne";
    case SolveStatus::KDiag: return "KDiag";
    }
    return "?";
}

struct SpectralSummary {
    double rho = 0.0;
    double lmax_abs = 0.0;
    double mu_gram = 0.0;
    double v_diag = 0.0;
    double envelope = 0.0;

    friend bool operator==(const SpectralSummary&, const SpectralSummary&) = default;
};

struct SolveReport {
    SolveStatus status = SolveStatus::Failed;
    double nu_opt = 0.0;                  // includes the affine offset
    Vector x_opt;                         // original coordinates
    std::size_t k_opt = 0;
    std::optional<std::size_t> k_pos;     // first rank with nu_k > 0
    std::vector<std::pair<std::size_t, std::size_t>> K_trace; // (rank, stopping rank)
    std::size_t iterations = 0;           // nu_k evaluations
    std::size_t N = default_positivity_cap;
    std::vector<double> nu_values;        // nu_0, nu_1, ... without offset
    std::optional<SpectralSummary> spectral;
    bool degenerate = false;              // value known without iterating

    [[nodiscard]] std::optional<std::size_t> final_K() const {
        if (K_trace.empty()) return std::nullopt;
        return K_trace.back().second;
    }

    friend bool operator==(const SolveReport& a, const SolveReport& b) {
        return a.status == b.status && a.nu_opt == b.nu_opt && a.x_opt.size() == b.x_opt.size() &&
               a.x_opt == b.x_opt && a.k_opt == b.k_opt && a.k_pos == b.k_pos && a.K_trace == b.K_trace &&
               a.iterations == b.iterations && a.N == b.N && a.nu_values == b.nu_values &&
               a.spectral == b.spectral && a.degenerate == b.degenerate;
    }
};

struct SolveOptions {
    qp::BarrierOptions qp;
    double positivity_margin = 0.0; // nu_k <= margin counts as non-positive
    std::size_t vertex_cap = geometry::default_vertex_cap;
};

inline void validate(const ProblemInstance& inst) {
    const auto d = inst.A.rows();
    if (inst.A.cols() != d || d == 0) throw Error(Errc::NonSquare, "A must be square and non-empty");
    if (inst.b.size() != d || inst.Q.rows() != d || inst.Q.cols() != d || inst.q.size() != d ||
        inst.Xin.dim() != d) {
        throw Error(Errc::DimensionMismatch, "A, b, Q, q and the initial set must share dimension " +
                                                 std::to_string(d));
    }
    if (!inst.A.allFinite() || !inst.b.allFinite() || !inst.Q.allFinite() || !inst.q.allFinite()) {
        throw Error(Errc::InvalidInput, "non-finite problem data");
    }
    if (inst.N == 0) throw Error(Errc::InvalidInput, "N must be positive");
}

inline ReducedInstance reduce_affine(const ProblemInstance& inst) {
    validate(inst);
    const auto d = inst.dim();
    ReducedInstance red{inst.A, 0.5 * (inst.Q + inst.Q.transpose()), inst.q, inst.Xin, 0.0, Vector::Zero(d)};
    if (inst.b.isZero(0.0)) return red;

    const Matrix shift = Matrix::Identity(d, d) - inst.A;
    Eigen::JacobiSVD<Matrix> svd(shift);
    const auto& sv = svd.singularValues();
    if (!(sv(sv.size() - 1) > 0.0) || sv(0) / sv(sv.size() - 1) > 1e12) {
        throw Error(Errc::SingularShift, "I - A is numerically singular");
    }
    red.b_tilde = shift.fullPivLu().solve(inst.b);
    red.q = 2.0 * red.Q * red.b_tilde + inst.q;
    red.offset = red.b_tilde.dot(red.Q * red.b_tilde) + inst.q.dot(red.b_tilde);
    red.Xwork = geometry::translate(inst.Xin, red.b_tilde);
    return red;
}

/// Evaluates nu_k (no offset) together with a maximizing initial point, in
/// reduced coordinates. Holds A^k between calls so consecutive ranks are cheap.
class RankEvaluator {
public:
    RankEvaluator(const ReducedInstance& red, qp::ObjectiveClass cls, const SolveOptions& opt = {})
        : red_(red), cls_(cls), opt_(opt), f_(qp::QuadraticObjective(red.Q, red.q), red.A) {
        if (cls_ == qp::ObjectiveClass::ConvexPSD) {
            verts_ = geometry::vertices(red.Xwork, opt_.vertex_cap);
        } else if (cls_ == qp::ObjectiveClass::StrictlyConcaveND) {
            if (!red.Xwork.is_box()) {
                throw Error(Errc::UnsupportedSet, "concave objectives need a box initial set");
            }
        } else {
            throw Error(Errc::UnsupportedObjective, "objective is neither convex nor strictly concave");
        }
    }

    [[nodiscard]] qp::Maximum at(std::size_t k) {
        if (k < f_.rank()) f_ = qp::SteppedObjective(f_.base(), red_.A);
        while (f_.rank() < k) f_.step_next();
        if (cls_ == qp::ObjectiveClass::ConvexPSD) return qp::maximize_convex_vertices(f_, verts_);
        return qp::maximize_concave_qp(f_, red_.Xwork, opt_.qp);
    }

private:
    const ReducedInstance& red_;
    qp::ObjectiveClass cls_;
    SolveOptions opt_;
    qp::SteppedObjective f_;
    geometry::VertexList verts_;
};

struct Evaluation {
    double nu = 0.0;
    Vector y;
};

inline Evaluation nu_at(const ReducedInstance& red, std::size_t k, qp::ObjectiveClass cls,
                        const SolveOptions& opt = {}) {
    RankEvaluator eval(red, cls, opt);
    auto m = eval.at(k);
    return {m.value, std::move(m.argmax)};
}

/// Sufficient conditions for nu_0 > 0 that need no optimization. A false
/// answer is inconclusive.
inline bool k_pos_screen(const ReducedInstance& red) {
    const auto ext = linalg::symmetric_extremes(red.Q);
    if (ext.min < -qp::tol_psd || red.Xwork.is_origin()) return false;
    const bool homogeneous = red.q.isZero(0.0);
    const auto d = red.Q.rows();

    bool has_interior = false;
    bool origin_inside = false;
    if (red.Xwork.is_box()) {
        const auto& box = red.Xwork.as_box();
        has_interior = (box.lower.array() < box.upper.array()).all();
        origin_inside = (box.lower.array() < 0.0).all() && (box.upper.array() > 0.0).all();
    } else {
        const auto& pts = red.Xwork.as_vertices().points;
        const Matrix diffs = pts.colwise() - Vector(pts.col(0));
        has_interior = diffs.cols() > 0 && Eigen::FullPivLU<Matrix>(diffs).rank() == d;
    }
    if (homogeneous && ext.min > qp::tol_psd) return true;
    if (homogeneous && has_interior) return true;
    return !homogeneous && origin_inside;
}

namespace detail {

inline SolveReport degenerate_report(const ReducedInstance& red, std::size_t N) {
    SolveReport r;
    r.status = SolveStatus::KDiag;
    r.nu_opt = red.offset;
    r.x_opt = red.b_tilde;
    r.N = N;
    r.degenerate = true;
    return r;
}

} // namespace detail

inline SolveReport solve(const ProblemInstance& inst, const SolveOptions& opt = {}) {
    validate(inst);
    const auto dec = linalg::eig_decompose(inst.A);
    if (!linalg::spectral_radius_check(dec)) {
        throw Error(Errc::NotConvergent, "spectral radius " + std::to_string(dec.rho) + " is not below 1");
    }
    const auto cls = qp::classify(qp::QuadraticObjective(inst.Q, inst.q));
    if (cls == qp::ObjectiveClass::Unsupported) {
        throw Error(Errc::UnsupportedObjective, "Q must be PSD with a positive eigenvalue, or negative definite");
    }
    const auto red = reduce_affine(inst);

    // sup is 0 (plus the offset) without any search
    if (red.Xwork.is_origin()) return detail::degenerate_report(red, inst.N);
    if (cls == qp::ObjectiveClass::StrictlyConcaveND && red.q.isZero(0.0)) {
        return detail::degenerate_report(red, inst.N);
    }

    const auto sd = bounds::build_spectral_data(dec, red.Q, red.q, red.Xwork);
    RankEvaluator eval(red, cls, opt);

    SolveReport r;
    r.N = inst.N;
    r.spectral = SpectralSummary{sd.rho(), sd.lmax_abs, sd.mu_gram, sd.v_diag, sd.envelope};

    auto finish = [&](std::size_t k_opt, double nu, const Vector& y) {
        r.k_opt = k_opt;
        r.nu_opt = nu + red.offset;
        r.x_opt = y + red.b_tilde;
        r.iterations = r.nu_values.size();
        return r;
    };

    auto best = eval.at(0);
    r.nu_values.push_back(best.value);
    if (bounds::corollary_one_holds(sd, best.value)) {
        r.status = SolveStatus::CorollaryOne;
        if (best.value > 0.0) r.k_pos = 0;
        return finish(0, best.value, best.argmax);
    }

    std::size_t k = 0;
    while (k < inst.N && best.value <= opt.positivity_margin) {
        ++k;
        best = eval.at(k);
        r.nu_values.push_back(best.value);
    }
    if (best.value <= opt.positivity_margin) {
        r.status = SolveStatus::Failed;
        r.iterations = r.nu_values.size();
        return r;
    }

    r.status = SolveStatus::KDiag;
    r.k_pos = k;
    std::size_t K = bounds::k_diag(sd, best.value);
    r.K_trace.emplace_back(k, K);
    std::size_t k_opt = k;
    while (k < K) {
        ++k;
        auto cur = eval.at(k);
        r.nu_values.push_back(cur.value);
        if (best.value < cur.value) {
            best = std::move(cur);
            k_opt = k;
            K = bounds::k_diag(sd, best.value);
            r.K_trace.emplace_back(k, K);
        }
    }
    return finish(k_opt, best.value, best.argmax);
}

struct BruteForceResult {
    double value = 0.0;
    std::size_t k = 0;
    Vector x;
};

/// max over k = 0..horizon of nu_k + offset by direct evaluation; the
/// smallest maximizing rank wins.
inline BruteForceResult brute_force(const ProblemInstance& inst, std::size_t horizon,
                                    const SolveOptions& opt = {}) {
    const auto cls = qp::classify(qp::QuadraticObjective(inst.Q, inst.q));
    const auto red = reduce_affine(inst);
    RankEvaluator eval(red, cls, opt);
    BruteForceResult out;
    double best = 0.0;
    for (std::size_t k = 0; k <= horizon; ++k) {
        auto m = eval.at(k);
        if (k == 0 || m.value > best) {
            best = m.value;
            out.k = k;
            out.x = m.argmax + red.b_tilde;
        }
    }
    out.value = best + red.offset;
    return out;
}

} // namespace reachmax
