#ifndef APPIC_SIMULATION_HPP
#define APPIC_SIMULATION_HPP

#include "appic/core.hpp"
#include "appic/field.hpp"
#include "appic/initial_condition.hpp"
#include "appic/particles.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace appic {

/// Grid quantities at one output time.
struct FieldFrame
{
    double t = 0.0;
    std::vector<double> n;
    std::vector<double> u;
    std::vector<double> phi;
    std::vector<double> E;
};

/// Per-step record: Newton iterations and l2 distance between n and e^phi.
struct StepDiagnostic
{
    double t = 0.0;
    int newton_iterations = 0;
    double quasineutrality_l2 = 0.0;
};

struct RunOutput
{
    std::vector<FieldFrame> frames;
    std::vector<StepDiagnostic> diagnostics;
    std::uint64_t seed = 0;
    std::string params_hash;
    std::size_t steps = 0;
    double dt = 0.0;
    double wall_seconds = 0.0;
    double mean_newton_iterations = 0.0;
    double initial_mass = 0.0;
    double final_mass = 0.0;
    /// Filled only when RunOptions::keep_particles is set.
    ParticleEnsemble final_particles;

    const FieldFrame& final_frame() const { return frames.back(); }
};

struct EnsembleOutput
{
    /// Pointwise mean over runs, accumulated in ascending run index.
    std::vector<FieldFrame> mean;
    /// Run-averaged per-step diagnostics.
    std::vector<StepDiagnostic> mean_diagnostics;
    std::vector<RunOutput> runs;

    const FieldFrame& final_frame() const { return mean.back(); }
};

struct RunOptions
{
    /// Requested output times; each snaps to the nearest completed step.
    /// Empty means the final time only.
    std::vector<double> output_times;
    bool record_diagnostics = true;
    std::size_t threads = 1;
    bool keep_particles = false;
};

/// Everything carried from t^m to t^{m+1}.
struct SimState
{
    ParticleEnsemble particles;
    MomentSet moments;
    std::vector<double> phi;
    std::vector<double> E;
    double t = 0.0;
    std::size_t step_index = 0;
    int last_newton_iterations = 0;
};

/// Deposits the given particles; phi and E start at zero.
SimState make_state(ParticleEnsemble particles, const Grid& grid);
SimState init_state(const SimParams& params, const InitialCondition& ic, std::uint64_t seed);

/// Time step of a run: cfl * h / max(max |u0| on the grid, 1).
double run_time_step(const SimParams& params, const InitialCondition& ic);

/// One cycle: rhs -> operator -> field solve -> E -> push -> deposit.
/// Solver failures are rethrown as SolverError naming the step index.
void advance(SimState& state, const SimParams& params, const Grid& grid, double dt);

RunOutput run(const SimParams& params, const InitialCondition& ic, std::uint64_t seed,
              const RunOptions& options = {});

/// N_c runs seeded with run_seed(base_seed, i, 0); fields averaged before any error metric.
EnsembleOutput run_ensemble(const SimParams& params, const InitialCondition& ic, const RunOptions& options = {});

/// u = J / n, zero where n < 1e-12.
std::vector<double> velocity_from_moments(const MomentSet& moments);

/// ||g - q|| / ||q|| with plain Euclidean norms. Throws InputError when q == 0.
double relative_error(std::span<const double> g, std::span<const double> q);

/// sqrt(h * sum (g - q)^2).
double l2_error(std::span<const double> g, std::span<const double> q, double h);

/// Block average of a fine periodic grid vector onto `coarse_cells` cells.
std::vector<double> block_average(std::span<const double> fine, std::size_t coarse_cells);

/// Stable textual fingerprint of the parameters, for provenance.
std::string params_fingerprint(const SimParams& params);

} // namespace appic

#endif // APPIC_SIMULATION_HPP
