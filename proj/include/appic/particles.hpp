#ifndef APPIC_PARTICLES_HPP
#define APPIC_PARTICLES_HPP

#include "appic/core.hpp"
#include "appic/initial_condition.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace appic {

/// Weighted markers, structure-of-arrays. Weights are fixed after initialization.
struct ParticleEnsemble
{
    std::vector<double> x;
    std::vector<double> v;
    std::vector<double> w;

    std::size_t size() const noexcept { return x.size(); }
    double total_weight() const;
};

/// Cell-averaged density n, current J = nu and momentum flux S.
struct MomentSet
{
    std::vector<double> n;
    std::vector<double> J;
    std::vector<double> S;

    explicit MomentSet(std::size_t cells = 0) : n(cells, 0.0), J(cells, 0.0), S(cells, 0.0) {}
    std::size_t size() const noexcept { return n.size(); }
};

/// NGP loading: M = N_total / N_cells particles per cell at uniform random offsets,
/// weight h n0(x_j) / M, velocity u0(X_k). A two-beam IC puts M/2 markers on each beam.
ParticleEnsemble init_particles(const InitialCondition& ic, const Grid& grid, std::size_t n_particles_total,
                                std::uint64_t seed);

/// Nearest-grid-point moments: n_j = (1/h) sum_{k in j} w_k, likewise with V_k and V_k^2.
MomentSet deposit_moments(const ParticleEnsemble& ensemble, const Grid& grid);

/// V <- V + dt E(cell of X); X <- wrap(X + dt V). Throws SolverError on non-finite E.
void push_particles(ParticleEnsemble& ensemble, std::span<const double> field, const Grid& grid, double dt);

/// Velocity-smoothing kernel (1 + cos(pi v / eta)) / (2 eta) on |v| <= eta.
double cosine_kernel(double v, double eta);

/// f(x_j, v_l) = (1/h) sum_{k in j} w_k B_eta(v_l - V_k), row-major (cell, velocity).
std::vector<double> reconstruct_phase_space(const ParticleEnsemble& ensemble, const Grid& grid,
                                            std::span<const double> velocities, double eta);

/// Delimited dump `k,x,v,w`, one record per particle.
void write_particle_dump(std::ostream& out, const ParticleEnsemble& ensemble);

} // namespace appic

#endif // APPIC_PARTICLES_HPP
