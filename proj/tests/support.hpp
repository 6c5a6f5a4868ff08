#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "reachmax/benchgen.hpp"
#include "reachmax/geometry.hpp"
#include "reachmax/linalg.hpp"
#include "reachmax/qpcore.hpp"
#include "reachmax/seqlab.hpp"
#include "reachmax/solver.hpp"

namespace testing_support {

using namespace reachmax;

inline Matrix oscillator_A() {
    Matrix A(2, 2);
    A << 1.0, 0.01, -0.01, 0.99;
    return A;
}

inline geometry::Polytope unit_square() {
    return geometry::Polytope::box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
}

inline ProblemInstance oscillator(const Matrix& Q, const Vector& q = Vector::Zero(2)) {
    ProblemInstance inst;
    inst.A = oscillator_A();
    inst.b = Vector::Zero(2);
    inst.Q = Q;
    inst.q = q;
    inst.Xin = unit_square();
    return inst;
}

inline Matrix diag2(double a, double b) {
    Matrix Q = Matrix::Zero(2, 2);
    Q(0, 0) = a;
    Q(1, 1) = b;
    return Q;
}

inline Matrix linear_term_Q() {
    Matrix Q(2, 2);
    Q << 1.0, -0.5, -0.5, 0.25;
    return Q;
}

inline Vector linear_term_q() {
    Vector q(2);
    q << -1.0, 0.5;
    return q;
}

// Example 1: x_{k+1} = x_k / 2 on [1/4, 1/2], objective x^2 - x.
inline ProblemInstance halving_line() {
    ProblemInstance inst;
    inst.A = Matrix::Constant(1, 1, 0.5);
    inst.b = Vector::Zero(1);
    inst.Q = Matrix::Constant(1, 1, 1.0);
    inst.q = Vector::Constant(1, -1.0);
    inst.Xin = geometry::Polytope::box(Vector::Constant(1, 0.25), Vector::Constant(1, 0.5));
    inst.N = 100;
    return inst;
}

// Hand-picked eigenbasis of the oscillator (columns 1, (i sqrt3 - 1)/2 and 1, -(i sqrt3 + 1)/2).
inline ComplexMatrix oscillator_paper_U() {
    const double s3 = std::sqrt(3.0);
    ComplexMatrix U(2, 2);
    U << Complex(1, 0), Complex(1, 0), Complex(-0.5, s3 / 2), Complex(-0.5, -s3 / 2);
    return U;
}

inline linalg::SpectralDecomposition oscillator_paper_decomposition() {
    linalg::SpectralDecomposition dec;
    dec.U = oscillator_paper_U();
    dec.D.resize(2);
    dec.D << Complex(199.0 / 200, std::sqrt(3.0) / 200), Complex(199.0 / 200, -std::sqrt(3.0) / 200);
    dec.U_inv = dec.U.inverse();
    dec.rho = std::sqrt(9901.0) / 100.0;
    return dec;
}

// Figure 1 families.
inline std::vector<double> fig1_x(std::size_t n) {
    std::vector<double> u(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double kk = static_cast<double>(k);
        u[k] = -4.0 * std::abs(std::sin((0.4 * kk + 0.5) * std::numbers::pi)) / (0.04 * kk + 1.0);
    }
    return u;
}

// sin(0.4 (k+1) pi) has period 5 in k; reduce first so the zeros are exact.
inline std::vector<double> fig1_y(std::size_t n) {
    std::vector<double> u(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto m = static_cast<double>((k + 1) % 5);
        const double s = m == 0.0 ? 0.0 : std::sin(0.4 * m * std::numbers::pi);
        u[k] = -3.0 * std::abs(s) / (0.1 * static_cast<double>(k) + 1.0);
    }
    return u;
}

inline std::vector<double> fig1_z(std::size_t n) {
    std::vector<double> u(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double kk = static_cast<double>(k);
        u[k] = (1.6 * kk - 1.6) / (0.08 * kk * kk + 0.5);
    }
    return u;
}

inline std::vector<double> fig1_t(std::size_t n) {
    std::vector<double> u(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double kk = static_cast<double>(k);
        u[k] = std::floor((1.2 * kk - 2.0) / (0.04 * kk * kk + 0.5));
    }
    return u;
}

// Small hand-rolled generators for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    std::size_t index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
    }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

    Vector vector(Eigen::Index d, double lo = -1.0, double hi = 1.0) {
        Vector v(d);
        for (Eigen::Index i = 0; i < d; ++i) v(i) = uniform(lo, hi);
        return v;
    }

    Matrix matrix(Eigen::Index r, Eigen::Index c, double lo = -1.0, double hi = 1.0) {
        Matrix m(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j) m(i, j) = uniform(lo, hi);
        return m;
    }

    geometry::Polytope box(Eigen::Index d) {
        const Vector c = vector(d);
        Vector r(d);
        for (Eigen::Index i = 0; i < d; ++i) r(i) = uniform(0.1, 1.0);
        return geometry::Polytope::box(c - r, c + r);
    }

    // Terms from a small integer alphabet (ties and zeros) or continuous.
    std::vector<double> sequence() {
        const auto n = index(1, 30);
        std::vector<double> u(n);
        const bool discrete = coin();
        const double shift = uniform(-2.0, 1.0);
        for (auto& x : u) {
            x = discrete ? static_cast<double>(static_cast<int>(index(0, 6)) - 3 + static_cast<int>(std::round(shift)))
                         : uniform(-3.0, 3.0) + shift;
        }
        return u;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

// Maximum of f over a box by repeated grid refinement around the incumbent.
// Exact enough for concave f; for convex f the first level already holds the corners.
inline double grid_max(const std::function<double(const Vector&)>& f, Vector lo, Vector hi, int points = 11,
                       int levels = 40) {
    const auto d = lo.size();
    const Vector lo0 = lo, hi0 = hi;
    double best = -std::numeric_limits<double>::infinity();
    Vector best_x = lo;
    for (int level = 0; level < levels; ++level) {
        std::vector<int> idx(static_cast<std::size_t>(d), 0);
        for (;;) {
            Vector x(d);
            for (Eigen::Index i = 0; i < d; ++i) {
                const double t = static_cast<double>(idx[static_cast<std::size_t>(i)]) / (points - 1);
                x(i) = lo(i) + t * (hi(i) - lo(i));
            }
            const double v = f(x);
            if (v > best) {
                best = v;
                best_x = x;
            }
            Eigen::Index i = 0;
            while (i < d && ++idx[static_cast<std::size_t>(i)] == points) idx[static_cast<std::size_t>(i++)] = 0;
            if (i == d) break;
        }
        const Vector half = (hi - lo) / (points - 1);
        lo = (best_x - half).cwiseMax(lo0);
        hi = (best_x + half).cwiseMin(hi0);
    }
    return best;
}

} // namespace testing_support
