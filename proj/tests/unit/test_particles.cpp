#include "appic/error.hpp"
#include "appic/initial_condition.hpp"
#include "appic/particles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace appic;

namespace {

ParticleEnsemble hand_ensemble()
{
    // N_h = 4 on [0, 1): two markers per cell, one exactly on a face.
    ParticleEnsemble e;
    e.x = {0.0, 0.1, 0.25, 0.4, 0.5, 0.6, 0.8, 0.99};
    e.v = {1.0, -1.0, 2.0, 0.0, 0.5, 0.5, -2.0, 3.0};
    e.w = {0.1, 0.2, 0.1, 0.1, 0.3, 0.1, 0.2, 0.1};
    return e;
}

} // namespace

TEST_SUITE("particles")
{
    TEST_CASE("NGP deposit matches hand sums")
    {
        const Grid g(0.0, 1.0, 4);
        const MomentSet m = deposit_moments(hand_ensemble(), g);
        // cell 0: {0.0, 0.1}; cell 1: {0.25, 0.4}; cell 2: {0.5, 0.6}; cell 3: {0.8, 0.99}
        CHECK(m.n[0] == doctest::Approx((0.1 + 0.2) / 0.25));
        CHECK(m.J[0] == doctest::Approx((0.1 * 1.0 - 0.2 * 1.0) / 0.25));
        CHECK(m.S[0] == doctest::Approx((0.1 + 0.2) / 0.25));
        CHECK(m.n[1] == doctest::Approx(0.2 / 0.25));
        CHECK(m.J[1] == doctest::Approx(0.2 / 0.25));
        CHECK(m.S[1] == doctest::Approx(0.4 / 0.25));
        CHECK(m.n[2] == doctest::Approx(0.4 / 0.25));
        CHECK(m.J[2] == doctest::Approx(0.2 / 0.25));
        CHECK(m.S[2] == doctest::Approx(0.1 / 0.25));
        CHECK(m.n[3] == doctest::Approx(0.3 / 0.25));
        CHECK(m.J[3] == doctest::Approx((-0.4 + 0.3) / 0.25));
        CHECK(m.S[3] == doctest::Approx((0.8 + 0.9) / 0.25));
    }

    TEST_CASE("deposit conserves total weight")
    {
        const Grid g(0.0, 1.0, 4);
        const auto e = hand_ensemble();
        const MomentSet m = deposit_moments(e, g);
        double mass = 0.0;
        for (double n : m.n)
            mass += n * g.h();
        CHECK(mass == doctest::Approx(e.total_weight()).epsilon(1e-14));
    }

    TEST_CASE("push: velocity from the old cell, then wrapped drift")
    {
        const Grid g(0.0, 1.0, 4);
        auto e = hand_ensemble();
        const std::vector<double> E{1.0, 2.0, 3.0, 4.0};
        const double dt = 0.1;
        const auto before = e;
        push_particles(e, E, g, dt);
        for (std::size_t k = 0; k < e.size(); ++k) {
            const double v = before.v[k] + dt * E[g.cell_of(before.x[k])];
            double x = before.x[k] + dt * v;
            x -= std::floor(x);
            CHECK(e.v[k] == doctest::Approx(v).epsilon(1e-15));
            CHECK(e.x[k] == doctest::Approx(x).epsilon(1e-14));
            CHECK(e.w[k] == before.w[k]);
        }
        // 0.99 + 0.1 * (3 + 0.4) wraps to 0.33.
        CHECK(e.x[7] == doctest::Approx(0.33));

        std::vector<double> bad{0.0, std::nan(""), 0.0, 0.0};
        CHECK_THROWS_AS(push_particles(e, bad, g, dt), SolverError);
        CHECK_THROWS_AS(push_particles(e, std::vector<double>{1.0}, g, dt), InputError);
    }

    TEST_CASE("small hand cases: weights, single marker, cancellation, wrap")
    {
        const Grid g(0.0, 1.0, 4);
        const auto flat = init_particles(make_equilibrium(), g, 8, 1);
        for (double w : flat.w)
            CHECK(w == 0.125);
        for (double v : flat.v)
            CHECK(v == 0.0);
        const MomentSet flat_m = deposit_moments(flat, g);
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(flat_m.n[j] == 1.0);
            CHECK(flat_m.J[j] == 0.0);
        }

        ParticleEnsemble one;
        one.x = {0.8};
        one.v = {2.0};
        one.w = {0.5};
        const MomentSet m1 = deposit_moments(one, g);
        CHECK(m1.n == std::vector<double>{0.0, 0.0, 0.0, 2.0});
        CHECK(m1.J == std::vector<double>{0.0, 0.0, 0.0, 4.0});
        CHECK(m1.S == std::vector<double>{0.0, 0.0, 0.0, 8.0});
        // monokinetic: S n = J^2
        CHECK(m1.S[3] * m1.n[3] == doctest::Approx(m1.J[3] * m1.J[3]));

        ParticleEnsemble pair;
        pair.x = {0.3, 0.4};
        pair.v = {1.0, -1.0};
        pair.w = {0.1, 0.1};
        const MomentSet m2 = deposit_moments(pair, g);
        CHECK(m2.J[1] == 0.0);
        CHECK(m2.S[1] == doctest::Approx(0.2 / 0.25));

        ParticleEnsemble wrap;
        wrap.x = {0.9};
        wrap.v = {1.0};
        wrap.w = {1.0};
        push_particles(wrap, std::vector<double>(4, 0.0), g, 0.3);
        CHECK(wrap.x[0] == doctest::Approx(0.2).epsilon(1e-14));
        CHECK(wrap.v[0] == 1.0);
    }

    TEST_CASE("deposit is additive over a union of ensembles")
    {
        const Grid g(0.0, 1.0, 4);
        const auto a = hand_ensemble();
        const auto b = init_particles(make_ap_test(), g, 40, 9);
        ParticleEnsemble u = a;
        u.x.insert(u.x.end(), b.x.begin(), b.x.end());
        u.v.insert(u.v.end(), b.v.begin(), b.v.end());
        u.w.insert(u.w.end(), b.w.begin(), b.w.end());
        const MomentSet ma = deposit_moments(a, g), mb = deposit_moments(b, g), mu = deposit_moments(u, g);
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(mu.n[j] == doctest::Approx(ma.n[j] + mb.n[j]).epsilon(1e-14));
            CHECK(mu.J[j] == doctest::Approx(ma.J[j] + mb.J[j]).epsilon(1e-14));
            CHECK(mu.S[j] == doctest::Approx(ma.S[j] + mb.S[j]).epsilon(1e-14));
        }
    }

    TEST_CASE("uniform field shifts every velocity by the same amount")
    {
        const Grid g(0.0, 1.0, 10);
        auto e = init_particles(make_ap_test(), g, 1000, 5);
        const auto before = e;
        push_particles(e, std::vector<double>(10, 0.7), g, 0.05);
        for (std::size_t k = 0; k < e.size(); ++k)
            CHECK(e.v[k] - before.v[k] == doctest::Approx(0.035).epsilon(1e-12));
    }

    TEST_CASE("loading reproduces the density at cell centers")
    {
        const Grid g(0.0, 1.0, 20);
        const InitialCondition ic = make_ap_test();
        const auto e = init_particles(ic, g, 2000, 42);
        REQUIRE(e.size() == 2000);
        const MomentSet m = deposit_moments(e, g);
        for (std::size_t j = 0; j < g.size(); ++j)
            CHECK(m.n[j] == doctest::Approx(ic.density(g.center(j))).epsilon(1e-12));
        for (std::size_t k = 0; k < e.size(); ++k) {
            CHECK(e.v[k] == doctest::Approx(0.4 * std::cos(2.0 * std::numbers::pi * e.x[k])));
            CHECK(g.cell_of(e.x[k]) == k / 100);
        }
        // Same seed, same markers.
        const auto again = init_particles(ic, g, 2000, 42);
        CHECK(again.x == e.x);
        const auto other = init_particles(ic, g, 2000, 43);
        CHECK(other.x != e.x);
    }

    TEST_CASE("two-beam loading splits markers evenly")
    {
        const Grid g(0.0, 1.0, 10);
        const std::vector<double> z{0.1, -0.2, 0.3, 0.0, 0.5};
        const InitialCondition ic = make_uq_test2(z);
        const auto e = init_particles(ic, g, 200, 3);
        const MomentSet m = deposit_moments(e, g);
        for (std::size_t j = 0; j < g.size(); ++j)
            CHECK(m.n[j] == doctest::Approx(ic.density(g.center(j))).epsilon(1e-12));
        CHECK_THROWS_AS(init_particles(ic, g, 10 * 3, 3), InputError);
        CHECK_THROWS_AS(init_particles(ic, g, 201, 3), InputError);
    }

    TEST_CASE("cosine kernel is a compactly supported unit mass")
    {
        for (double eta : {1.0, 0.3}) {
            CHECK(cosine_kernel(0.0, eta) == doctest::Approx(1.0 / eta));
            CHECK(cosine_kernel(1.01 * eta, eta) == 0.0);
            CHECK(cosine_kernel(-eta, eta) == doctest::Approx(0.0));
            const int n = 20000;
            double sum = 0.0;
            for (int i = 0; i < n; ++i) {
                const double v = -eta + (i + 0.5) * 2.0 * eta / n;
                sum += cosine_kernel(v, eta) * 2.0 * eta / n;
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-8));
            CHECK(cosine_kernel(0.2 * eta, eta) == doctest::Approx(cosine_kernel(-0.2 * eta, eta)));
        }
    }

    TEST_CASE("phase-space reconstruction integrates back to the density")
    {
        const Grid g(0.0, 1.0, 4);
        const auto e = hand_ensemble();
        std::vector<double> vs;
        const double dv = 0.001;
        for (double v = -5.0; v <= 5.0; v += dv)
            vs.push_back(v);
        const auto f = reconstruct_phase_space(e, g, vs, 1.0);
        const MomentSet m = deposit_moments(e, g);
        for (std::size_t j = 0; j < g.size(); ++j) {
            double n = 0.0;
            for (std::size_t l = 0; l < vs.size(); ++l)
                n += f[j * vs.size() + l] * dv;
            CHECK(n == doctest::Approx(m.n[j]).epsilon(1e-6));
        }
    }

    TEST_CASE("particle dump format")
    {
        ParticleEnsemble e;
        e.x = {0.5};
        e.v = {-1.0};
        e.w = {0.25};
        std::ostringstream s;
        write_particle_dump(s, e);
        CHECK(s.str() == "k,x,v,w\n0,0.5,-1,0.25\n");
    }
}
