#include "appic/particles.hpp"

#include "appic/csv.hpp"
#include "appic/error.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

namespace appic {

double ParticleEnsemble::total_weight() const
{
    double sum = 0.0;
    for (double wk : w)
        sum += wk;
    return sum;
}

ParticleEnsemble init_particles(const InitialCondition& ic, const Grid& grid, std::size_t n_particles_total,
                                std::uint64_t seed)
{
    const std::size_t cells = grid.size();
    if (n_particles_total == 0 || n_particles_total % cells != 0)
        throw InputError("n_particles_total must be a positive multiple of the cell count");
    const std::size_t per_cell = n_particles_total / cells;
    const std::size_t beams = ic.beams.size();
    if (beams == 0 || beams > 2)
        throw InputError("initial condition must have one or two beams");
    if (beams == 2 && per_cell % 2 != 0)
        throw InputError("a two-beam initial condition needs an even particle count per cell");
    const std::size_t per_beam = per_cell / beams;

    ParticleEnsemble ens;
    ens.x.reserve(n_particles_total);
    ens.v.reserve(n_particles_total);
    ens.w.reserve(n_particles_total);

    std::mt19937_64 rng(seed);
    const double h = grid.h();
    for (std::size_t j = 0; j < cells; ++j) {
        const double xc = grid.center(j);
        const double face = grid.x_left() + static_cast<double>(j) * h;
        for (const Beam& beam : ic.beams) {
            const double n0 = beam.density(xc);
            if (!(n0 > 0.0) || !std::isfinite(n0))
                throw InputError("initial density must be positive, got " + std::to_string(n0) +
                                 " at x = " + std::to_string(xc));
            const double weight = h * n0 / static_cast<double>(per_beam);
            for (std::size_t k = 0; k < per_beam; ++k) {
                double x = face + to_unit_interval(rng()) * h;
                if (grid.cell_of(x) != j)
                    x = xc;
                ens.x.push_back(x);
                ens.v.push_back(beam.velocity(x));
                ens.w.push_back(weight);
            }
        }
    }
    return ens;
}

MomentSet deposit_moments(const ParticleEnsemble& ensemble, const Grid& grid)
{
    MomentSet m(grid.size());
    const std::size_t np = ensemble.size();
    const double* x = ensemble.x.data();
    const double* v = ensemble.v.data();
    const double* w = ensemble.w.data();
    for (std::size_t k = 0; k < np; ++k) {
        const std::size_t j = grid.cell_of(x[k]);
        const double wv = w[k] * v[k];
        m.n[j] += w[k];
        m.J[j] += wv;
        m.S[j] += wv * v[k];
    }
    const double inv_h = 1.0 / grid.h();
    for (std::size_t j = 0; j < m.size(); ++j) {
        m.n[j] *= inv_h;
        m.J[j] *= inv_h;
        m.S[j] *= inv_h;
    }
    return m;
}

void push_particles(ParticleEnsemble& ensemble, std::span<const double> field, const Grid& grid, double dt)
{
    if (field.size() != grid.size())
        throw InputError("push_particles: field length does not match the grid");
    for (double e : field)
        if (!std::isfinite(e))
            throw SolverError("push_particles: non-finite electric field");
    const std::size_t np = ensemble.size();
    double* x = ensemble.x.data();
    double* v = ensemble.v.data();
    for (std::size_t k = 0; k < np; ++k) {
        v[k] += dt * field[grid.cell_of(x[k])];
        x[k] = grid.wrap(x[k] + dt * v[k]);
    }
}

double cosine_kernel(double v, double eta)
{
    if (std::abs(v / eta) > 1.0)
        return 0.0;
    return (1.0 + std::cos(std::numbers::pi * std::abs(v) / eta)) / (2.0 * eta);
}

std::vector<double> reconstruct_phase_space(const ParticleEnsemble& ensemble, const Grid& grid,
                                            std::span<const double> velocities, double eta)
{
    const std::size_t nv = velocities.size();
    std::vector<double> f(grid.size() * nv, 0.0);
    for (std::size_t k = 0; k < ensemble.size(); ++k) {
        const std::size_t j = grid.cell_of(ensemble.x[k]);
        for (std::size_t l = 0; l < nv; ++l)
            f[j * nv + l] += ensemble.w[k] * cosine_kernel(velocities[l] - ensemble.v[k], eta);
    }
    for (double& value : f)
        value /= grid.h();
    return f;
}

void write_particle_dump(std::ostream& out, const ParticleEnsemble& ensemble)
{
    out << "k,x,v,w\n";
    for (std::size_t k = 0; k < ensemble.size(); ++k)
        out << k << ',' << format_real(ensemble.x[k]) << ',' << format_real(ensemble.v[k]) << ','
            << format_real(ensemble.w[k]) << '\n';
}

} // namespace appic
