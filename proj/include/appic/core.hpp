#ifndef APPIC_CORE_HPP
#define APPIC_CORE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace appic {

enum class PoissonMode { newton, penalty, quasineutral };

std::string to_string(PoissonMode mode);
PoissonMode parse_poisson_mode(std::string_view text);

/// Uniform periodic grid of cell centers x_j = x_left + (j + 1/2) h, j = 0..n_cells-1.
class Grid
{
public:
    Grid(double x_left, double x_right, std::size_t n_cells);

    std::size_t size() const noexcept { return n_cells_; }
    double h() const noexcept { return h_; }
    double x_left() const noexcept { return x_left_; }
    double x_right() const noexcept { return x_right_; }
    double length() const noexcept { return x_right_ - x_left_; }

    double center(std::size_t j) const noexcept
    {
        return x_left_ + (static_cast<double>(j) + 0.5) * h_;
    }
    std::vector<double> centers() const;

    /// Maps any x into [x_left, x_right). Idempotent.
    double wrap(double x) const noexcept;

    /// Containing cell of a wrapped position. A particle on a cell face belongs
    /// to the cell on its right.
    std::size_t cell_of(double x) const noexcept;

    std::size_t next(std::size_t j) const noexcept { return j + 1 == n_cells_ ? 0 : j + 1; }
    std::size_t prev(std::size_t j) const noexcept { return j == 0 ? n_cells_ - 1 : j - 1; }

private:
    double x_left_;
    double x_right_;
    std::size_t n_cells_;
    double h_;
    double inv_h_;
};

/// Every scalar knob of a high-fidelity run. Field names double as config keys.
struct SimParams
{
    double epsilon = 1.0;
    double x_left = 0.0;
    double x_right = 1.0;
    std::size_t n_cells = 100;
    std::size_t n_particles_total = 100000;
    std::size_t n_ensemble = 1;
    double cfl = 0.4;
    double t_final = 0.2;
    double newton_tol = 1e-8;
    int newton_max_iter = 50;
    double kernel_width = 1.0;
    std::uint64_t base_seed = 20250116;
    PoissonMode poisson_mode = PoissonMode::newton;

    Grid grid() const { return Grid(x_left, x_right, n_cells); }
    std::size_t particles_per_cell() const { return n_particles_total / n_cells; }

    /// Throws ConfigError when an invariant is violated.
    void validate() const;

    /// Sets one field from its textual config form. Returns false for an unknown key.
    bool set(std::string_view key, std::string_view value);
};

/// Fixed run time step: cfl * h / max(u0_max, 1).
double derive_time_step(double cfl, double h, double u0_max);

/// Deterministic 64-bit seed for (base, run, sample). Asymmetric in its arguments.
std::uint64_t run_seed(std::uint64_t base_seed, std::uint64_t run_index, std::uint64_t sample_index);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
inline double to_unit_interval(std::uint64_t bits) noexcept
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// 64-bit FNV-1a digest of `text` as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

/// Discrete L2 norm sqrt(h * sum v_i^2).
double l2_norm(std::span<const double> v, double h);

} // namespace appic

#endif // APPIC_CORE_HPP
