#include "appic/euler.hpp"

#include "appic/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace appic {

EulerState euler_initial_state(const InitialCondition& ic, std::size_t n_cells)
{
    if (n_cells < 3)
        throw InputError("Lax-Friedrichs grid needs at least 3 nodes");
    EulerState s;
    s.x_left = ic.x_left;
    s.h = (ic.x_right - ic.x_left) / static_cast<double>(n_cells);
    s.n.resize(n_cells);
    s.m.resize(n_cells);
    for (std::size_t j = 0; j < n_cells; ++j) {
        const double x = s.node(j);
        s.n[j] = ic.density(x);
        if (!(s.n[j] > 0.0))
            throw InputError("Euler initial density must be positive at x = " + std::to_string(x));
        s.m[j] = ic.momentum(x);
    }
    return s;
}

EulerState lf_step(const EulerState& state, double tau, double cfl_limit)
{
    const std::size_t n = state.size();
    double speed = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        speed = std::max(speed, std::abs(state.m[j] / state.n[j]) + 1.0);
    if (tau * speed > cfl_limit * state.h)
        throw InputError("Lax-Friedrichs step violates the CFL bound: tau = " + std::to_string(tau));

    std::vector<double> f0(n), f1(n);
    for (std::size_t j = 0; j < n; ++j)
        euler_flux(state.n[j], state.m[j], f0[j], f1[j]);

    EulerState next = state;
    const double c = tau / (2.0 * state.h);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t jp = j + 1 == n ? 0 : j + 1;
        const std::size_t jm = j == 0 ? n - 1 : j - 1;
        next.n[j] = 0.5 * (state.n[jp] + state.n[jm]) - c * (f0[jp] - f0[jm]);
        next.m[j] = 0.5 * (state.m[jp] + state.m[jm]) - c * (f1[jp] - f1[jm]);
    }
    for (std::size_t j = 0; j < n; ++j)
        if (!(next.n[j] > 0.0))
            throw SolverError("Lax-Friedrichs density lost positivity at node " + std::to_string(j));
    return next;
}

namespace {

EulerFrame frame_of(const EulerState& s, double t)
{
    EulerFrame f{t, s.n, std::vector<double>(s.size())};
    for (std::size_t j = 0; j < s.size(); ++j)
        f.u[j] = s.m[j] / s.n[j];
    return f;
}

double total(const std::vector<double>& v, double h)
{
    double sum = 0.0;
    for (double x : v)
        sum += x;
    return h * sum;
}

} // namespace

EulerOutput run_euler(const EulerParams& params, const InitialCondition& ic, std::span<const double> output_times)
{
    if (!(params.dt_factor > 0.0) || !(params.t_final >= 0.0))
        throw InputError("run_euler: dt_factor must be > 0 and t_final >= 0");
    EulerState state = euler_initial_state(ic, params.n_cells);
    const double tau = params.dt_factor * state.h;

    EulerOutput out;
    out.tau = tau;
    out.x.resize(state.size());
    for (std::size_t j = 0; j < state.size(); ++j)
        out.x[j] = state.node(j);
    out.initial_mass = total(state.n, state.h);
    out.initial_momentum = total(state.m, state.h);

    auto full = static_cast<std::size_t>(std::floor(params.t_final / tau));
    double remainder = params.t_final - static_cast<double>(full) * tau;
    if (remainder <= 1e-9 * tau)
        remainder = 0.0;
    if (remainder >= tau * (1.0 - 1e-9)) {
        ++full;
        remainder = 0.0;
    }
    const std::size_t total_steps = full + (remainder > 0.0 ? 1 : 0);
    auto time_of = [&](std::size_t k) {
        return k >= total_steps ? params.t_final : static_cast<double>(k) * tau;
    };

    std::vector<std::size_t> record;
    if (output_times.empty()) {
        record.push_back(total_steps);
    } else {
        for (double t : output_times) {
            t = std::clamp(t, 0.0, params.t_final);
            std::size_t best = std::min(static_cast<std::size_t>(std::floor(t / tau)), total_steps);
            for (std::size_t k : {best + 1, total_steps})
                if (k <= total_steps && std::abs(time_of(k) - t) < std::abs(time_of(best) - t))
                    best = k;
            record.push_back(best);
        }
        std::sort(record.begin(), record.end());
        record.erase(std::unique(record.begin(), record.end()), record.end());
    }

    std::size_t next_record = 0;
    if (record[next_record] == 0) {
        out.frames.push_back(frame_of(state, 0.0));
        ++next_record;
    }
    for (std::size_t k = 1; k <= total_steps; ++k) {
        const double step = (k == total_steps && remainder > 0.0) ? remainder : tau;
        try {
            state = lf_step(state, step, params.cfl_limit);
        } catch (const SolverError& e) {
            throw SolverError("Lax-Friedrichs step " + std::to_string(k) + ": " + e.what());
        }
        if (next_record < record.size() && record[next_record] == k) {
            out.frames.push_back(frame_of(state, time_of(k)));
            ++next_record;
        }
    }
    out.steps = total_steps;
    out.final_mass = total(state.n, state.h);
    out.final_momentum = total(state.m, state.h);
    return out;
}

std::vector<double> interpolate_periodic(std::span<const double> values, double x_left, double h,
                                         std::span<const double> xs)
{
    const std::size_t n = values.size();
    const double length = h * static_cast<double>(n);
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double s = std::fmod(xs[i] - x_left, length);
        if (s < 0.0)
            s += length;
        const double pos = s / h;
        auto j = static_cast<std::size_t>(std::floor(pos));
        double frac = pos - static_cast<double>(j);
        if (j >= n) {
            j = n - 1;
            frac = 1.0;
        }
        const std::size_t jp = j + 1 == n ? 0 : j + 1;
        out[i] = (1.0 - frac) * values[j] + frac * values[jp];
    }
    return out;
}

} // namespace appic
