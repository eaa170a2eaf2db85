#ifndef APPIC_EXPERIMENTS_HPP
#define APPIC_EXPERIMENTS_HPP

#include "appic/config.hpp"
#include "appic/core.hpp"
#include "appic/euler.hpp"
#include "appic/kl.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace appic {

/// Everything one subcommand needs, resolved from config entries and overrides.
struct ExperimentSpec
{
    SimParams sim;
    /// Domain endpoints given explicitly; otherwise they follow the IC.
    bool domain_set = false;
    std::string ic = "ap-test";
    /// Parameter vector for simulate-style runs of a parametrized family; zeros when empty.
    std::vector<double> z;
    std::vector<double> output_times;

    std::vector<double> epsilon_list{1.0, 0.01, 1e-4};
    std::vector<std::size_t> nx_list{25, 50, 100};
    std::size_t nx_ref = 200;

    EulerParams lf;
    std::vector<std::size_t> r_list{2, 4, 6, 8, 10};
    std::size_t n_train = 100;
    std::size_t n_validation = 20;
    std::uint64_t sample_seed = 7;
    KlSettings kl;

    bool dump_particles = false;
    /// Velocity nodes of the optional phase-space reconstruction; 0 disables it.
    std::size_t phase_space_nv = 0;
    double phase_space_vmax = 2.0;

    std::size_t threads = 1;
    std::filesystem::path out_dir = "out";

    /// Applies one `key = value` setting. Throws ConfigError for unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
    void apply(const ConfigEntries& entries);
    /// Fixes the domain from the IC (unless set explicitly) and validates.
    void finalize();
    /// Stable hash of the resolved settings, recorded as provenance.
    std::string fingerprint() const;
};

struct ConvergenceRow
{
    double epsilon;
    std::size_t nx;
    std::string quantity;
    double error;
};

struct ConvergenceResult
{
    std::vector<ConvergenceRow> rows;
    /// (epsilon, quantity, slope) of the log-log least-squares fit of error against h.
    struct Slope
    {
        double epsilon;
        std::string quantity;
        double slope;
    };
    std::vector<Slope> slopes;
    double slope(double epsilon, const std::string& quantity) const;
};

struct LimitRow
{
    double epsilon;
    double err_n;
    double err_u;
    double err_phi;
    /// Mean of ||n - e^phi|| over the second half of the run.
    double saturated_qn;
};

struct SchemeRow
{
    std::string quantity;
    double l2_difference;
    double relative_difference;
};

struct BifiRow
{
    std::size_t r;
    std::string quantity;
    double epsilon;
    double bifi_error;
    double lofi_error;
};

struct BifiResult
{
    std::vector<BifiRow> rows;
    /// Largest relative interpolation error over the selected points, per epsilon.
    std::vector<double> interpolation_error;
    std::vector<double> condition_number;
    double bifi(double epsilon, std::size_t r, const std::string& quantity) const;
    double lofi(double epsilon, const std::string& quantity) const;
};

/// Each command writes its CSVs under spec.out_dir and prints a short summary to `log`.
void cmd_simulate(const ExperimentSpec& spec, std::ostream& log);
ConvergenceResult cmd_converge(const ExperimentSpec& spec, std::ostream& log);
std::vector<LimitRow> cmd_limit_compare(const ExperimentSpec& spec, std::ostream& log);
std::vector<SchemeRow> cmd_scheme_compare(const ExperimentSpec& spec, std::ostream& log);
BifiResult cmd_bifidelity(const ExperimentSpec& spec, std::ostream& log);
void cmd_kl_info(const ExperimentSpec& spec, std::ostream& log);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace appic

#endif // APPIC_EXPERIMENTS_HPP
