#include <gtest/gtest.h>

#include "support.hpp"

using namespace reachmax;
using namespace testing_support;

namespace {

Vector v1(double v) { return Vector::Constant(1, v); }

ProblemInstance line_instance(double a, double b, double Q, double q, double lo, double hi) {
    ProblemInstance inst;
    inst.A = Matrix::Constant(1, 1, a);
    inst.b = v1(b);
    inst.Q = Matrix::Constant(1, 1, Q);
    inst.q = v1(q);
    inst.Xin = geometry::Polytope::box(v1(lo), v1(hi));
    return inst;
}

std::vector<std::size_t> trace_values(const SolveReport& r) {
    std::vector<std::size_t> out;
    for (const auto& [k, K] : r.K_trace) out.push_back(K);
    return out;
}

} // namespace

TEST(ReduceAffine, LinearIsIdentity) {
    const auto inst = oscillator(linear_term_Q(), linear_term_q());
    const auto red = reduce_affine(inst);
    EXPECT_EQ(red.offset, 0.0);
    EXPECT_EQ(red.q, inst.q);
    EXPECT_EQ(red.Xwork, inst.Xin);
    EXPECT_EQ(red.b_tilde, Vector::Zero(2));
}

TEST(ReduceAffine, GeometricSeries) {
    const auto red = reduce_affine(line_instance(0.5, 1, 1, 0, -1, 1));
    EXPECT_DOUBLE_EQ(red.b_tilde(0), 2.0);
    EXPECT_DOUBLE_EQ(red.Xwork.as_box().lower(0), -3.0);
    EXPECT_DOUBLE_EQ(red.Xwork.as_box().upper(0), -1.0);
    EXPECT_DOUBLE_EQ(red.q(0), 4.0);
    EXPECT_DOUBLE_EQ(red.offset, 4.0);
}

TEST(NuAt, Examples) {
    const auto red = reduce_affine(oscillator(Matrix::Identity(2, 2)));
    EXPECT_EQ(nu_at(red, 0, qp::ObjectiveClass::ConvexPSD).nu, 2.0);

    const auto ex1 = reduce_affine(halving_line());
    for (std::size_t k : {0u, 1u, 5u, 30u}) {
        const double h = std::pow(0.5, static_cast<double>(k));
        const double expected = h * h / 16 - h / 4;
        EXPECT_NEAR(nu_at(ex1, k, qp::ObjectiveClass::ConvexPSD).nu, expected, 1e-15);
        EXPECT_LT(nu_at(ex1, k, qp::ObjectiveClass::ConvexPSD).nu, 0.0);
    }

    const auto pos = reduce_affine(oscillator(diag2(1, 0)));
    EXPECT_NEAR(nu_at(pos, 61, qp::ObjectiveClass::ConvexPSD).nu, 1.64886, 1e-5);
}

TEST(Solve, OscillatorIdentity) {
    const auto r = solve(oscillator(Matrix::Identity(2, 2)));
    EXPECT_EQ(r.status, SolveStatus::KDiag);
    EXPECT_NEAR(r.nu_opt, 2.0, 1e-12);
    EXPECT_EQ(r.k_opt, 0u);
    ASSERT_EQ(r.K_trace.size(), 1u);
    EXPECT_EQ(r.K_trace[0], (std::pair<std::size_t, std::size_t>{0, 111}));
    EXPECT_EQ(r.k_pos, std::optional<std::size_t>{0});
    EXPECT_EQ(r.iterations, 112u);
}

TEST(Solve, OscillatorPosition) {
    const auto r = solve(oscillator(diag2(1, 0)));
    EXPECT_EQ(r.status, SolveStatus::KDiag);
    EXPECT_NEAR(r.nu_opt, 1.64886, 1e-4);
    EXPECT_EQ(r.k_opt, 61u);
    EXPECT_EQ(r.K_trace.front(), (std::pair<std::size_t, std::size_t>{0, 140}));
    EXPECT_EQ(r.final_K(), std::optional<std::size_t>{90});
    const auto K = trace_values(r);
    EXPECT_TRUE(std::is_sorted(K.rbegin(), K.rend()));
}

TEST(Solve, OscillatorSpeed) {
    const auto r = solve(oscillator(diag2(0, 1)));
    EXPECT_EQ(r.status, SolveStatus::KDiag);
    EXPECT_EQ(r.nu_opt, 1.0);
    EXPECT_EQ(r.k_opt, 0u);
    EXPECT_EQ(r.K_trace.front().second, 140u);
}

TEST(Solve, OscillatorLinearTerm) {
    const auto r = solve(oscillator(linear_term_Q(), linear_term_q()));
    EXPECT_EQ(r.status, SolveStatus::KDiag);
    EXPECT_EQ(r.nu_opt, 3.75);
    EXPECT_EQ(r.k_opt, 0u);
    Vector x(2);
    x << -1, 1;
    EXPECT_EQ(r.x_opt, x);
    EXPECT_EQ(r.K_trace.front().second, 115u);
    ASSERT_TRUE(r.spectral);
    EXPECT_NEAR(r.spectral->v_diag, 0.5, 1e-12);
    EXPECT_NEAR(r.spectral->envelope, 7 + std::sqrt(7.0), 1e-9);
}

TEST(Solve, HalvingLineFails) {
    const auto r = solve(halving_line());
    EXPECT_EQ(r.status, SolveStatus::Failed);
    EXPECT_EQ(r.iterations, 101u);
    EXPECT_FALSE(r.k_pos);
    for (double v : r.nu_values) EXPECT_LE(v, 0.0);
}

TEST(Solve, CorollaryOneExit) {
    // A = 0: every later term is 0 while nu_0 reaches the envelope
    auto inst = line_instance(0.0, 0.0, 1.0, 0.0, -1, 1);
    const auto r = solve(inst);
    EXPECT_EQ(r.status, SolveStatus::CorollaryOne);
    EXPECT_EQ(r.nu_opt, 1.0);
    EXPECT_EQ(r.k_opt, 0u);
    EXPECT_EQ(r.iterations, 1u);
}

TEST(Solve, DegenerateCases) {
    // concave and homogeneous
    const auto r = solve(line_instance(0.5, 0.0, -1.0, 0.0, 1, 2));
    EXPECT_TRUE(r.degenerate);
    EXPECT_EQ(r.status, SolveStatus::KDiag);
    EXPECT_EQ(r.nu_opt, 0.0);
    EXPECT_EQ(r.iterations, 0u);

    // the initial set is the fixed point
    const auto s = solve(line_instance(0.5, 1.0, 1.0, 1.0, 2, 2));
    EXPECT_TRUE(s.degenerate);
    EXPECT_DOUBLE_EQ(s.nu_opt, 6.0);
    EXPECT_DOUBLE_EQ(s.x_opt(0), 2.0);
}

TEST(Solve, Errors) {
    auto expect_code = [](const ProblemInstance& inst, Errc code) {
        try {
            (void)solve(inst);
            ADD_FAILURE() << "no error";
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), code) << e.what();
        }
    };
    auto jordan = oscillator(Matrix::Identity(2, 2));
    jordan.A << 0.5, 1, 0, 0.5;
    expect_code(jordan, Errc::NotDiagonalizable);
    expect_code(line_instance(1.0, 0, 1, 0, -1, 1), Errc::NotConvergent);
    expect_code(oscillator(diag2(1, -1)), Errc::UnsupportedObjective);
    auto concave_vertices = oscillator(-Matrix::Identity(2, 2), Vector::Ones(2));
    concave_vertices.Xin = geometry::Polytope::from_vertices(Matrix(Matrix::Identity(2, 2)));
    expect_code(concave_vertices, Errc::UnsupportedSet);
    auto mismatch = oscillator(Matrix::Identity(2, 2));
    mismatch.q = Vector::Zero(3);
    expect_code(mismatch, Errc::DimensionMismatch);
}

TEST(Solve, Deterministic) {
    const auto inst = oscillator(diag2(1, 0));
    EXPECT_TRUE(solve(inst) == solve(inst));
}

TEST(BruteForce, Examples) {
    const auto b = brute_force(oscillator(Matrix::Identity(2, 2)), 300);
    EXPECT_EQ(b.value, 2.0);
    EXPECT_EQ(b.k, 0u);

    const auto inst = line_instance(0.5, 1.0, 1.0, -1.0, -1, 1);
    const auto z = brute_force(inst, 0);
    const auto red = reduce_affine(inst);
    const auto e = nu_at(red, 0, qp::ObjectiveClass::ConvexPSD);
    EXPECT_EQ(z.k, 0u);
    EXPECT_DOUBLE_EQ(z.value, e.nu + red.offset);
    EXPECT_DOUBLE_EQ(z.x(0), e.y(0) + red.b_tilde(0));
}

TEST(KPosScreen, Examples) {
    EXPECT_TRUE(k_pos_screen(reduce_affine(oscillator(Matrix::Identity(2, 2)))));
    auto point = oscillator(diag2(1, 0));
    point.Xin = geometry::Polytope::box(Vector::Constant(2, 0.5), Vector::Constant(2, 0.5));
    EXPECT_FALSE(k_pos_screen(reduce_affine(point)));
    EXPECT_TRUE(k_pos_screen(reduce_affine(oscillator(linear_term_Q(), linear_term_q()))));
    EXPECT_TRUE(k_pos_screen(reduce_affine(oscillator(diag2(1, 0)))));
}

namespace {

ProblemInstance random_problem(Gen& g, std::size_t i, bool allow_linear_cah = false) {
    for (;;) {
        bench::BenchSpec spec;
        spec.dim = g.index(1, 5);
        spec.system = g.coin() ? bench::SystemKind::Linear : bench::SystemKind::Affine;
        spec.objective = static_cast<bench::ObjectiveKind>(g.index(0, 3));
        if (!allow_linear_cah && spec.system == bench::SystemKind::Linear &&
            spec.objective == bench::ObjectiveKind::CAH)
            continue;
        spec.set = bench::is_concave(spec.objective) || g.coin() ? bench::SetKind::make_box()
                                                                 : bench::SetKind::make_vertices(g.index(1, 8));
        spec.seed = 4242;
        return bench::random_instance(spec, i);
    }
}

} // namespace

TEST(SolverProperties, OracleAgreement) {
    Gen g(61);
    std::size_t kdiag = 0;
    for (std::size_t i = 0; i < 120; ++i) {
        const auto inst = random_problem(g, i);
        const auto r = solve(inst);
        const auto K = trace_values(r);
        EXPECT_TRUE(std::is_sorted(K.rbegin(), K.rend()));
        if (r.status == SolveStatus::Failed) {
            EXPECT_EQ(r.iterations, inst.N + 1);
            // independent re-evaluation
            const auto red = reduce_affine(inst);
            const auto cls = qp::classify(qp::QuadraticObjective(red.Q, red.q));
            for (std::size_t k = 0; k <= inst.N; k += 9) EXPECT_LE(nu_at(red, k, cls).nu, 0.0);
            continue;
        }
        if (r.status != SolveStatus::KDiag || r.degenerate) continue;
        ++kdiag;
        const auto fk = *r.final_K();
        EXPECT_LE(r.k_opt, fk);
        const auto b = brute_force(inst, 4 * fk);
        EXPECT_NEAR(r.nu_opt, b.value, 1e-7) << "instance " << i;
        // the prefix sup at the final K is already the answer
        const auto prefix = seqlab::partial_sup(seqlab::FiniteC0Sequence(r.nu_values), 0, fk);
        EXPECT_NEAR(prefix + reduce_affine(inst).offset, r.nu_opt, 1e-12);
        // k_opt attains the value
        const auto red = reduce_affine(inst);
        const auto cls = qp::classify(qp::QuadraticObjective(red.Q, red.q));
        EXPECT_NEAR(nu_at(red, r.k_opt, cls).nu + red.offset, r.nu_opt, 1e-9);
    }
    EXPECT_GT(kdiag, 60u);
}

TEST(SolverProperties, ReportDeterminism) {
    Gen g(62);
    for (std::size_t i = 0; i < 20; ++i) {
        const auto inst = random_problem(g, i, true);
        EXPECT_TRUE(solve(inst) == solve(inst));
    }
}
