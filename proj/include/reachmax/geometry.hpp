#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <variant>
#include <vector>

#include "reachmax/error.hpp"
#include "reachmax/linalg.hpp"

namespace reachmax {
namespace geometry {

inline constexpr std::size_t default_vertex_cap = std::size_t{1} << 22;
inline constexpr double dedup_tol = 1e-12;

struct Box {
    Vector lower;
    Vector upper;
};

/// Points stored column-wise.
struct VertexSet {
    Matrix points;
};

class Polytope {
public:
    static Polytope box(Vector lower, Vector upper) {
        if (lower.size() == 0 || lower.size() != upper.size()) {
            throw Error(Errc::DimensionMismatch, "box bounds must be non-empty and of equal length");
        }
        if (!lower.allFinite() || !upper.allFinite()) throw Error(Errc::InvalidInput, "non-finite box bound");
        for (Eigen::Index i = 0; i < lower.size(); ++i) {
            if (lower(i) > upper(i)) {
                throw Error(Errc::Infeasible, "empty box: lower > upper at coordinate " + std::to_string(i));
            }
        }
        return Polytope(Box{std::move(lower), std::move(upper)});
    }

    static Polytope from_vertices(Matrix points) {
        if (points.cols() == 0 || points.rows() == 0) throw Error(Errc::EmptyVertexList, "no vertices given");
        if (!points.allFinite()) throw Error(Errc::InvalidInput, "non-finite vertex coordinate");
        return Polytope(VertexSet{std::move(points)});
    }

    static Polytope from_vertices(const std::vector<Vector>& points) {
        if (points.empty()) throw Error(Errc::EmptyVertexList, "no vertices given");
        Matrix m(points.front().size(), static_cast<Eigen::Index>(points.size()));
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (points[i].size() != m.rows()) throw Error(Errc::DimensionMismatch, "ragged vertex list");
            m.col(static_cast<Eigen::Index>(i)) = points[i];
        }
        return from_vertices(std::move(m));
    }

    [[nodiscard]] Eigen::Index dim() const {
        return std::visit([](const auto& r) -> Eigen::Index {
            if constexpr (std::is_same_v<std::decay_t<decltype(r)>, Box>) return r.lower.size();
            else return r.points.rows();
        }, rep_);
    }

    [[nodiscard]] bool is_box() const noexcept { return std::holds_alternative<Box>(rep_); }
    [[nodiscard]] const Box& as_box() const { return std::get<Box>(rep_); }
    [[nodiscard]] const VertexSet& as_vertices() const { return std::get<VertexSet>(rep_); }
    [[nodiscard]] const std::variant<Box, VertexSet>& representation() const noexcept { return rep_; }

    /// True when the set is exactly the origin.
    [[nodiscard]] bool is_origin() const {
        if (is_box()) return as_box().lower.isZero(0.0) && as_box().upper.isZero(0.0);
        return as_vertices().points.isZero(0.0);
    }

    friend bool operator==(const Polytope& a, const Polytope& b) {
        if (a.is_box() != b.is_box()) return false;
        if (a.is_box()) return a.as_box().lower == b.as_box().lower && a.as_box().upper == b.as_box().upper;
        return a.as_vertices().points == b.as_vertices().points;
    }

private:
    explicit Polytope(std::variant<Box, VertexSet> rep) : rep_(std::move(rep)) {}

    std::variant<Box, VertexSet> rep_;
};

struct VertexList {
    Matrix points; // one vertex per column

    [[nodiscard]] Eigen::Index size() const noexcept { return points.cols(); }
    [[nodiscard]] Eigen::Index dim() const noexcept { return points.rows(); }
    [[nodiscard]] auto operator[](Eigen::Index i) const { return points.col(i); }
};

namespace detail {

inline Matrix dedup_columns(const Matrix& pts, double tol) {
    const Eigen::Index m = pts.cols();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return pts(0, a) < pts(0, b); });

    // Sweep in first-coordinate order; only kept points within tol on that
    // coordinate can be duplicates.
    std::vector<char> keep(static_cast<std::size_t>(m), 1);
    std::vector<Eigen::Index> kept_sorted;
    for (const auto idx : order) {
        bool dup = false;
        for (auto it = kept_sorted.rbegin(); it != kept_sorted.rend(); ++it) {
            if (pts(0, idx) - pts(0, *it) > tol) break;
            if ((pts.col(idx) - pts.col(*it)).cwiseAbs().maxCoeff() <= tol) {
                // the earliest occurrence in input order survives
                if (idx < *it) {
                    keep[static_cast<std::size_t>(*it)] = 0;
                    *it = idx;
                } else {
                    keep[static_cast<std::size_t>(idx)] = 0;
                }
                dup = true;
                break;
            }
        }
        if (!dup) kept_sorted.push_back(idx);
    }
    const auto count = std::count(keep.begin(), keep.end(), 1);
    Matrix out(pts.rows(), count);
    Eigen::Index c = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (keep[static_cast<std::size_t>(i)]) out.col(c++) = pts.col(i);
    }
    return out;
}

} // namespace detail

/// Box corners in lexicographic order (first coordinate most significant,
/// lower bound before upper); vertex sets deduplicated within 1e-12.
inline VertexList vertices(const Polytope& P, std::size_t cap = default_vertex_cap) {
    if (!P.is_box()) return {detail::dedup_columns(P.as_vertices().points, dedup_tol)};

    const auto& box = P.as_box();
    const auto d = box.lower.size();
    if (d >= 63 || (std::uint64_t{1} << d) > cap) {
        throw Error(Errc::DimensionTooLarge,
                    "box of dimension " + std::to_string(d) + " exceeds the vertex cap");
    }
    const auto count = Eigen::Index{1} << d;
    Matrix pts(d, count);
    for (Eigen::Index v = 0; v < count; ++v) {
        for (Eigen::Index j = 0; j < d; ++j) {
            const bool up = (v >> (d - 1 - j)) & 1;
            pts(j, v) = up ? box.upper(j) : box.lower(j);
        }
    }
    return {std::move(pts)};
}

/// P - t.
inline Polytope translate(const Polytope& P, const Vector& t) {
    if (t.size() != P.dim()) throw Error(Errc::DimensionMismatch, "translation vector length");
    if (P.is_box()) return Polytope::box(P.as_box().lower - t, P.as_box().upper - t);
    return Polytope::from_vertices(Matrix(P.as_vertices().points.colwise() - t));
}

/// sup over P of x^T Re(B) x, for a Hermitian B whose real part is PSD.
inline double mu(const ComplexMatrix& B, const Polytope& P) {
    if (B.rows() != P.dim() || B.cols() != P.dim()) throw Error(Errc::DimensionMismatch, "mu");
    if (!linalg::is_hermitian(B)) throw Error(Errc::NotHermitian, "mu expects a Hermitian matrix");
    const Matrix re = B.real();
    if (linalg::symmetric_extremes(re).min < -1e-9) {
        throw Error(Errc::NotConvexForm, "real part is not positive semidefinite");
    }
    const Matrix sym = 0.5 * (re + re.transpose());
    const auto V = vertices(P);
    const Eigen::RowVectorXd values = (V.points.array() * (sym * V.points).array()).colwise().sum();
    return values.maxCoeff();
}

} // namespace geometry
} // namespace reachmax
