#ifndef APPIC_EULER_HPP
#define APPIC_EULER_HPP

#include "appic/initial_condition.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace appic {

/// Conserved variables U = (n, nu) on periodic nodes x_j = x_left + j h, j = 0..N_l-1.
struct EulerState
{
    std::vector<double> n;
    std::vector<double> m;
    double x_left = 0.0;
    double h = 1.0;

    std::size_t size() const noexcept { return n.size(); }
    double node(std::size_t j) const noexcept { return x_left + static_cast<double>(j) * h; }
};

struct EulerParams
{
    std::size_t n_cells = 1000;
    /// tau = dt_factor * h.
    double dt_factor = 0.1;
    /// Upper bound on tau * max(|u| + 1) / h checked before every step.
    double cfl_limit = 1.0;
    double t_final = 0.5;
};

struct EulerFrame
{
    double t = 0.0;
    std::vector<double> n;
    std::vector<double> u;
};

struct EulerOutput
{
    std::vector<double> x;
    std::vector<EulerFrame> frames;
    std::size_t steps = 0;
    double tau = 0.0;
    double initial_mass = 0.0;
    double initial_momentum = 0.0;
    double final_mass = 0.0;
    double final_momentum = 0.0;

    const EulerFrame& final_frame() const { return frames.back(); }
};

/// Isothermal flux F(U) = (nu, nu^2 + n).
inline void euler_flux(double n, double m, double& f0, double& f1)
{
    f0 = m;
    f1 = m * m / n + n;
}

EulerState euler_initial_state(const InitialCondition& ic, std::size_t n_cells);

/// U_j <- (U_{j+1} + U_{j-1}) / 2 - tau / (2h) (F(U_{j+1}) - F(U_{j-1})), periodic.
/// Throws InputError when tau breaks the CFL bound and SolverError when n <= 0 afterwards.
EulerState lf_step(const EulerState& state, double tau, double cfl_limit = 1.0);

/// Steps to t_final (last step shortened). Frames at the requested times, or the final time only.
EulerOutput run_euler(const EulerParams& params, const InitialCondition& ic,
                      std::span<const double> output_times = {});

/// Periodic linear interpolation from nodes x_left + j h onto arbitrary points.
std::vector<double> interpolate_periodic(std::span<const double> values, double x_left, double h,
                                         std::span<const double> xs);

} // namespace appic

#endif // APPIC_EULER_HPP
