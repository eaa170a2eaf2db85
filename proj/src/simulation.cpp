#include "appic/simulation.hpp"

#include "appic/error.hpp"
#include "appic/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace appic {

std::vector<double> velocity_from_moments(const MomentSet& moments)
{
    std::vector<double> u(moments.size(), 0.0);
    for (std::size_t j = 0; j < u.size(); ++j)
        if (moments.n[j] >= 1e-12)
            u[j] = moments.J[j] / moments.n[j];
    return u;
}

SimState make_state(ParticleEnsemble particles, const Grid& grid)
{
    SimState s;
    s.particles = std::move(particles);
    for (double& x : s.particles.x)
        x = grid.wrap(x);
    s.moments = deposit_moments(s.particles, grid);
    s.phi.assign(grid.size(), 0.0);
    s.E.assign(grid.size(), 0.0);
    return s;
}

SimState init_state(const SimParams& params, const InitialCondition& ic, std::uint64_t seed)
{
    const Grid grid = params.grid();
    return make_state(init_particles(ic, grid, params.n_particles_total, seed), grid);
}

double run_time_step(const SimParams& params, const InitialCondition& ic)
{
    const Grid grid = params.grid();
    const std::vector<double> xs = grid.centers();
    return derive_time_step(params.cfl, grid.h(), ic.max_speed(xs));
}

void advance(SimState& state, const SimParams& params, const Grid& grid, double dt)
{
    try {
        const std::vector<double> b = assemble_rhs(state.moments, grid, dt);
        const double eps = params.poisson_mode == PoissonMode::quasineutral ? 0.0 : params.epsilon;
        const CyclicOperator A = build_operator(state.moments, grid, dt, eps);
        if (params.poisson_mode == PoissonMode::penalty) {
            state.phi = solve_poisson_penalty(A, b, state.phi);
            state.last_newton_iterations = 0;
        } else {
            NewtonSettings ns{params.newton_tol, params.newton_max_iter, grid.h()};
            NewtonResult r = solve_poisson_newton(A, b, state.phi, ns);
            state.phi = std::move(r.phi);
            state.last_newton_iterations = r.iterations;
        }
        state.E = electric_field(state.phi, grid);
        push_particles(state.particles, state.E, grid, dt);
        state.moments = deposit_moments(state.particles, grid);
        ++state.step_index;
    } catch (const SolverError& e) {
        throw SolverError("step " + std::to_string(state.step_index + 1) + ": " + e.what(), e.residual());
    }
}

namespace {

FieldFrame capture(const SimState& s)
{
    return {s.t, s.moments.n, velocity_from_moments(s.moments), s.phi, s.E};
}

double mass(const MomentSet& m, double h)
{
    double sum = 0.0;
    for (double v : m.n)
        sum += v;
    return h * sum;
}

} // namespace

RunOutput run(const SimParams& params, const InitialCondition& ic, std::uint64_t seed, const RunOptions& options)
{
    params.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const Grid grid = params.grid();
    const double tol = 1e-12 * grid.length();
    if (std::abs(ic.x_left - params.x_left) > tol || std::abs(ic.x_right - params.x_right) > tol)
        throw InputError("initial condition '" + ic.name + "' lives on a different domain than the run");
    const double dt = run_time_step(params, ic);

    auto full_steps = static_cast<std::size_t>(std::floor(params.t_final / dt));
    double remainder = params.t_final - static_cast<double>(full_steps) * dt;
    if (remainder <= 1e-9 * dt)
        remainder = 0.0;
    if (remainder >= dt * (1.0 - 1e-9)) {
        ++full_steps;
        remainder = 0.0;
    }
    const std::size_t total_steps = full_steps + (remainder > 0.0 ? 1 : 0);
    auto time_of = [&](std::size_t m) {
        return m >= total_steps ? params.t_final : static_cast<double>(m) * dt;
    };

    std::set<std::size_t> record;
    const std::vector<double> wanted = options.output_times.empty() ? std::vector<double>{params.t_final}
                                                                    : options.output_times;
    for (double tau : wanted) {
        tau = std::clamp(tau, 0.0, params.t_final);
        const auto lo = std::min(static_cast<std::size_t>(std::floor(tau / dt)), total_steps);
        std::size_t best = lo;
        for (std::size_t m : {lo + 1, total_steps})
            if (m <= total_steps && std::abs(time_of(m) - tau) < std::abs(time_of(best) - tau))
                best = m;
        record.insert(best);
    }

    RunOutput out;
    out.seed = seed;
    out.params_hash = params_fingerprint(params);
    out.dt = dt;
    out.steps = total_steps;

    SimState state = init_state(params, ic, seed);
    out.initial_mass = mass(state.moments, grid.h());
    if (record.count(0))
        out.frames.push_back(capture(state));

    long long newton_total = 0;
    std::vector<double> expo(grid.size());
    for (std::size_t m = 1; m <= total_steps; ++m) {
        const double step_dt = (m == total_steps && remainder > 0.0) ? remainder : dt;
        advance(state, params, grid, step_dt);
        state.t = time_of(m);
        newton_total += state.last_newton_iterations;
        if (options.record_diagnostics) {
            for (std::size_t j = 0; j < expo.size(); ++j)
                expo[j] = std::exp(state.phi[j]);
            out.diagnostics.push_back(
                {state.t, state.last_newton_iterations, l2_error(state.moments.n, expo, grid.h())});
        }
        if (record.count(m))
            out.frames.push_back(capture(state));
    }

    out.final_mass = mass(state.moments, grid.h());
    if (options.keep_particles)
        out.final_particles = std::move(state.particles);
    out.mean_newton_iterations =
        total_steps > 0 ? static_cast<double>(newton_total) / static_cast<double>(total_steps) : 0.0;
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

namespace {

void accumulate(std::vector<double>& acc, const std::vector<double>& v)
{
    for (std::size_t i = 0; i < acc.size(); ++i)
        acc[i] += v[i];
}

void scale(std::vector<double>& v, double s)
{
    for (double& x : v)
        x *= s;
}

} // namespace

EnsembleOutput run_ensemble(const SimParams& params, const InitialCondition& ic, const RunOptions& options)
{
    params.validate();
    EnsembleOutput out;
    out.runs.resize(params.n_ensemble);
    parallel_for(params.n_ensemble, options.threads, [&](std::size_t i) {
        try {
            out.runs[i] = run(params, ic, run_seed(params.base_seed, i, 0), options);
        } catch (const SolverError& e) {
            throw SolverError("run " + std::to_string(i) + ": " + e.what(), e.residual());
        }
    });

    const double inv = 1.0 / static_cast<double>(params.n_ensemble);
    out.mean = out.runs.front().frames;
    for (std::size_t f = 0; f < out.mean.size(); ++f) {
        FieldFrame& m = out.mean[f];
        for (std::size_t i = 1; i < out.runs.size(); ++i) {
            const FieldFrame& r = out.runs[i].frames[f];
            accumulate(m.n, r.n);
            accumulate(m.u, r.u);
            accumulate(m.phi, r.phi);
            accumulate(m.E, r.E);
        }
        scale(m.n, inv);
        scale(m.u, inv);
        scale(m.phi, inv);
        scale(m.E, inv);
    }

    out.mean_diagnostics = out.runs.front().diagnostics;
    for (std::size_t s = 0; s < out.mean_diagnostics.size(); ++s) {
        double qn = out.mean_diagnostics[s].quasineutrality_l2;
        double it = out.mean_diagnostics[s].newton_iterations;
        for (std::size_t i = 1; i < out.runs.size(); ++i) {
            qn += out.runs[i].diagnostics[s].quasineutrality_l2;
            it += out.runs[i].diagnostics[s].newton_iterations;
        }
        out.mean_diagnostics[s].quasineutrality_l2 = qn * inv;
        out.mean_diagnostics[s].newton_iterations = static_cast<int>(std::lround(it * inv));
    }
    return out;
}

double relative_error(std::span<const double> g, std::span<const double> q)
{
    if (g.size() != q.size())
        throw InputError("relative_error: size mismatch");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        num += (g[i] - q[i]) * (g[i] - q[i]);
        den += q[i] * q[i];
    }
    if (den == 0.0)
        throw InputError("relative_error: reference vector is identically zero");
    return std::sqrt(num) / std::sqrt(den);
}

double l2_error(std::span<const double> g, std::span<const double> q, double h)
{
    if (g.size() != q.size())
        throw InputError("l2_error: size mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        sum += (g[i] - q[i]) * (g[i] - q[i]);
    return std::sqrt(h * sum);
}

std::vector<double> block_average(std::span<const double> fine, std::size_t coarse_cells)
{
    if (coarse_cells == 0 || fine.size() % coarse_cells != 0)
        throw InputError("block_average: fine size must be a multiple of the coarse size");
    const std::size_t factor = fine.size() / coarse_cells;
    std::vector<double> out(coarse_cells, 0.0);
    for (std::size_t c = 0; c < coarse_cells; ++c) {
        for (std::size_t k = 0; k < factor; ++k)
            out[c] += fine[c * factor + k];
        out[c] /= static_cast<double>(factor);
    }
    return out;
}

std::string params_fingerprint(const SimParams& p)
{
    std::ostringstream s;
    char buf[64];
    auto real = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g;", v);
        s << buf;
    };
    real(p.epsilon);
    real(p.x_left);
    real(p.x_right);
    s << p.n_cells << ';' << p.n_particles_total << ';' << p.n_ensemble << ';';
    real(p.cfl);
    real(p.t_final);
    real(p.newton_tol);
    s << p.newton_max_iter << ';';
    real(p.kernel_width);
    s << p.base_seed << ';' << to_string(p.poisson_mode);
    return fnv1a_hex(s.str());
}

} // namespace appic
