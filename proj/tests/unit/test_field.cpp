#include "appic/error.hpp"
#include "appic/field.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

using namespace appic;

namespace {

// Dense copy of the operator built directly from the stencil definition.
Eigen::MatrixXd dense(const std::vector<double>& a)
{
    const auto n = static_cast<Eigen::Index>(a.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index ip = (i + 1) % n;
        const Eigen::Index im = (i + n - 1) % n;
        m(i, i) += a[static_cast<std::size_t>(im)] + a[static_cast<std::size_t>(i)];
        m(i, ip) -= a[static_cast<std::size_t>(i)];
        m(i, im) -= a[static_cast<std::size_t>(im)];
    }
    return m;
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo, double hi)
{
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (double& x : v)
        x = d(rng);
    return v;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_SUITE("field")
{
    TEST_CASE("operator stencil, symmetry and zero row sums")
    {
        const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
        const CyclicOperator A(a);
        const auto y = A.apply(std::vector<double>{1.0, 0.0, 0.0, 0.0});
        // Column 0 of the stencil: diagonal a3 + a0, neighbours -a0 (row 1) and -a3 (row 3).
        CHECK(y[0] == 5.0);
        CHECK(y[1] == -1.0);
        CHECK(y[2] == 0.0);
        CHECK(y[3] == -4.0);
        const auto ones = A.apply(std::vector<double>(4, 1.0));
        for (double v : ones)
            CHECK(v == 0.0);
        const Eigen::MatrixXd M = dense(a);
        CHECK((M - M.transpose()).norm() == 0.0);
        CHECK(A.diagonal(0) == 5.0);
        CHECK(A.diagonal(2) == 5.0);

        CHECK_FALSE(A.is_degenerate());
        CHECK_FALSE(CyclicOperator({0.0, 1.0, 1.0}).is_degenerate());
        CHECK(CyclicOperator({0.0, 1.0, 0.0}).is_degenerate());
        CHECK_THROWS_AS(CyclicOperator({1.0, -1.0}), InputError);
        CHECK_THROWS_AS(CyclicOperator({1.0}), InputError);
    }

    TEST_CASE("cyclic solve agrees with dense LU")
    {
        std::mt19937_64 rng(17);
        for (std::size_t n : {2u, 3u, 4u, 7u, 64u}) {
            for (int trial = 0; trial < 5; ++trial) {
                auto a = random_vector(rng, n, 0.0, 50.0);
                if (trial == 1)
                    a[n - 1] = 0.0; // no periodic coupling
                if (trial == 2)
                    a[0] = 0.0;
                const auto shift = random_vector(rng, n, 0.01, 3.0);
                const auto rhs = random_vector(rng, n, -1.0, 1.0);
                const auto x = solve_shifted(CyclicOperator(a), shift, rhs);

                Eigen::MatrixXd M = dense(a);
                for (std::size_t i = 0; i < n; ++i)
                    M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += shift[i];
                const Eigen::VectorXd ref =
                    M.partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(rhs.data(), static_cast<Eigen::Index>(n)));
                CHECK_MESSAGE(max_abs_diff(x, std::span<const double>(ref.data(), n)) < 1e-10 * (1.0 + ref.norm()),
                              "n=" << n << " trial=" << trial);
            }
        }
        CHECK_THROWS_AS(solve_shifted(CyclicOperator({1.0, 1.0, 1.0}), std::vector<double>{1.0, 0.0, 1.0},
                                      std::vector<double>{1.0, 1.0, 1.0}),
                        InputError);
    }

    TEST_CASE("operator edges")
    {
        const Grid g(0.0, 1.0, 4);
        MomentSet m(4);
        m.n = {1.0, 2.0, 0.5, 0.0};
        const double dt = 0.1;
        const double eps = 0.3;
        const auto A = build_operator(m, g, dt, eps);
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(A.edge(i) == doctest::Approx((eps * eps + dt * dt * m.n[i]) * 16.0));
        // Quasineutral operator with a vacuum cell keeps three live edges.
        CHECK_FALSE(build_operator(m, g, dt, 0.0).is_degenerate());
        m.n[1] = -1.0;
        CHECK_THROWS_AS(build_operator(m, g, dt, eps), InputError);
    }

    TEST_CASE("right-hand side against a brute-force stencil")
    {
        std::mt19937_64 rng(3);
        const std::size_t n = 9;
        const Grid g(-1.0, 2.0, n);
        MomentSet m(n);
        m.n = random_vector(rng, n, 0.5, 1.5);
        m.J = random_vector(rng, n, -1.0, 1.0);
        m.S = random_vector(rng, n, 0.0, 2.0);
        const double dt = 0.05;
        const double h = g.h();
        const auto b = assemble_rhs(m, g, dt);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t ip = (i + 1) % n;
            const std::size_t im = (i + n - 1) % n;
            const double lap = (m.S[ip] - 2.0 * m.S[i] + m.S[im]) / (h * h);
            const double div = (m.J[i] - m.J[im]) / h;
            CHECK(b[i] == doctest::Approx(dt * dt * lap + m.n[i] - dt * div).epsilon(1e-13));
        }

        // Uniform current and flux: only the density survives.
        MomentSet u(n);
        u.n.assign(n, 1.25);
        u.J.assign(n, 0.7);
        u.S.assign(n, 3.0);
        for (double v : assemble_rhs(u, g, dt))
            CHECK(v == doctest::Approx(1.25).epsilon(1e-13));
    }

    TEST_CASE("central-difference field matches its Taylor form")
    {
        const Grid g(0.0, 1.0, 32);
        std::vector<double> phi(32);
        const double k = 2.0 * std::numbers::pi;
        for (std::size_t j = 0; j < 32; ++j)
            phi[j] = std::sin(k * g.center(j));
        const auto E = electric_field(phi, g);
        for (std::size_t j = 0; j < 32; ++j)
            CHECK(E[j] == doctest::Approx(-std::cos(k * g.center(j)) * std::sin(k * g.h()) / g.h()).epsilon(1e-12));
        // Constants carry no field.
        for (double e : electric_field(std::vector<double>(32, 2.5), g))
            CHECK(e == 0.0);
    }

    TEST_CASE("Newton recovers a planted solution quadratically")
    {
        std::mt19937_64 rng(11);
        for (std::size_t n : {2u, 5u, 50u}) {
            const auto a = random_vector(rng, n, 0.0, 100.0);
            const CyclicOperator A(a);
            const auto planted = random_vector(rng, n, -1.0, 1.0);
            auto b = A.apply(planted);
            for (std::size_t i = 0; i < n; ++i)
                b[i] += std::exp(planted[i]);

            const std::vector<double> zero(n, 0.0);
            const auto tight = solve_poisson_newton(A, b, zero, {1e-12, 50, 0.02});
            CHECK(max_abs_diff(tight.phi, planted) < 1e-10);
            CHECK(tight.iterations <= 10);
            CHECK(tight.residual < 1e-9);

            // The step-size criterion trips at 1e-4, yet the error is far smaller: quadratic, not linear, contraction.
            const auto loose = solve_poisson_newton(A, b, zero, {1e-4, 50, 1.0});
            CHECK(max_abs_diff(loose.phi, planted) < 1e-7);
        }
    }

    TEST_CASE("Newton: equilibrium root, warm start, failures")
    {
        const CyclicOperator A(std::vector<double>(6, 3.0));
        const std::vector<double> ones(6, 1.0);
        const std::vector<double> zero(6, 0.0);
        const auto r = solve_poisson_newton(A, ones, zero, {1e-8, 50, 1.0 / 6});
        CHECK(r.iterations == 1);
        for (double p : r.phi)
            CHECK(p == 0.0);

        // A warm start at the answer needs a single confirming step.
        std::vector<double> b(6);
        for (std::size_t i = 0; i < 6; ++i)
            b[i] = std::exp(0.3);
        const std::vector<double> at(6, 0.3);
        CHECK(solve_poisson_newton(A, b, at, {1e-8, 50, 1.0}).iterations == 1);

        CHECK_THROWS_AS(solve_poisson_newton(A, std::vector<double>(6, 1e6), zero, {1e-14, 2, 1.0}), SolverError);
        std::vector<double> bad = ones;
        bad[2] = std::nan("");
        CHECK_THROWS_AS(solve_poisson_newton(A, bad, zero, {1e-8, 50, 1.0}), InputError);
        CHECK_THROWS_AS(solve_poisson_newton(A, ones, std::vector<double>(6, 800.0), {1e-8, 50, 1.0}), SolverError);
    }

    TEST_CASE("penalty step against a dense solve")
    {
        std::mt19937_64 rng(23);
        const std::size_t n = 12;
        const auto a = random_vector(rng, n, 0.0, 10.0);
        const auto b = random_vector(rng, n, 0.5, 1.5);
        const auto prev = random_vector(rng, n, -0.5, 0.5);
        const auto phi = solve_poisson_penalty(CyclicOperator(a), b, prev);

        Eigen::MatrixXd M = dense(a) + Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
            rhs(static_cast<Eigen::Index>(i)) = b[i] + prev[i] - std::exp(prev[i]);
        const Eigen::VectorXd ref = M.partialPivLu().solve(rhs);
        CHECK(max_abs_diff(phi, std::span<const double>(ref.data(), n)) < 1e-12);
    }

    TEST_CASE("penalty and Newton agree when the linearization point is the root")
    {
        const std::size_t n = 8;
        std::mt19937_64 rng(4);
        const CyclicOperator A(random_vector(rng, n, 0.0, 5.0));
        const auto planted = random_vector(rng, n, -0.3, 0.3);
        auto b = A.apply(planted);
        for (std::size_t i = 0; i < n; ++i)
            b[i] += std::exp(planted[i]);
        CHECK(max_abs_diff(solve_poisson_penalty(A, b, planted), planted) < 1e-12);
    }

    TEST_CASE("quasineutral solves")
    {
        const Grid g(0.0, 1.0, 10);
        MomentSet m(10);
        for (std::size_t j = 0; j < 10; ++j) {
            m.n[j] = 1.0 + 0.2 * std::sin(2.0 * std::numbers::pi * g.center(j));
            m.J[j] = 0.1;
            m.S[j] = m.n[j] * 0.01;
        }
        const std::vector<double> zero(10, 0.0);
        const NewtonSettings ns{1e-12, 50, g.h()};
        const auto newton = quasineutral_solve(m, g, 0.01, PoissonMode::newton, zero, ns);
        CHECK(newton.residual < 1e-10);
        const auto penalty = quasineutral_solve(m, g, 0.01, PoissonMode::penalty, newton.phi, ns);
        CHECK(max_abs_diff(penalty.phi, newton.phi) < 1e-10);
        CHECK_THROWS_AS(quasineutral_solve(m, g, 0.01, PoissonMode::quasineutral, zero, ns), InputError);
    }
}
