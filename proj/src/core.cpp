#include "appic/core.hpp"

#include "appic/config.hpp"
#include "appic/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace appic {

std::string to_string(PoissonMode mode)
{
    switch (mode) {
    case PoissonMode::newton: return "newton";
    case PoissonMode::penalty: return "penalty";
    case PoissonMode::quasineutral: return "quasineutral";
    }
    return "unknown";
}

PoissonMode parse_poisson_mode(std::string_view text)
{
    const std::string t = trim(text);
    if (t == "newton")
        return PoissonMode::newton;
    if (t == "penalty")
        return PoissonMode::penalty;
    if (t == "quasineutral")
        return PoissonMode::quasineutral;
    throw ConfigError("poisson_mode must be newton, penalty or quasineutral, got '" + t + "'");
}

Grid::Grid(double x_left, double x_right, std::size_t n_cells)
    : x_left_(x_left), x_right_(x_right), n_cells_(n_cells)
{
    if (!std::isfinite(x_left) || !std::isfinite(x_right) || !(x_right > x_left))
        throw InputError("grid needs finite x_left < x_right");
    if (n_cells < 2)
        throw InputError("grid needs at least 2 cells");
    h_ = (x_right - x_left) / static_cast<double>(n_cells);
    inv_h_ = 1.0 / h_;
}

std::vector<double> Grid::centers() const
{
    std::vector<double> xs(n_cells_);
    for (std::size_t j = 0; j < n_cells_; ++j)
        xs[j] = center(j);
    return xs;
}

double Grid::wrap(double x) const noexcept
{
    if (x >= x_left_ && x < x_right_)
        return x;
    const double len = length();
    double r = std::fmod(x - x_left_, len);
    if (r < 0.0)
        r += len;
    double out = x_left_ + r;
    if (!(out < x_right_) || out < x_left_)
        out = x_left_;
    return out;
}

std::size_t Grid::cell_of(double x) const noexcept
{
    const double s = (x - x_left_) * inv_h_;
    if (!(s > 0.0))
        return 0;
    const auto j = static_cast<std::size_t>(s);
    return j < n_cells_ ? j : n_cells_ - 1;
}

void SimParams::validate() const
{
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
        throw ConfigError("epsilon must be finite and >= 0");
    if (!std::isfinite(x_left) || !std::isfinite(x_right) || !(x_right > x_left))
        throw ConfigError("need finite x_left < x_right");
    if (n_cells < 2)
        throw ConfigError("n_cells must be >= 2");
    if (n_particles_total == 0 || n_particles_total % n_cells != 0)
        throw ConfigError("n_particles_total must be a positive multiple of n_cells");
    if (n_ensemble < 1)
        throw ConfigError("n_ensemble must be >= 1");
    if (!(cfl > 0.0 && cfl < 1.0))
        throw ConfigError("cfl must lie in (0, 1)");
    if (!(t_final >= 0.0) || !std::isfinite(t_final))
        throw ConfigError("t_final must be finite and >= 0");
    if (!(newton_tol > 0.0))
        throw ConfigError("newton_tol must be > 0");
    if (newton_max_iter < 1)
        throw ConfigError("newton_max_iter must be >= 1");
    if (!(kernel_width > 0.0))
        throw ConfigError("kernel_width must be > 0");
}

bool SimParams::set(std::string_view key, std::string_view value)
{
    if (key == "epsilon")
        epsilon = parse::real(key, value);
    else if (key == "x_left")
        x_left = parse::real(key, value);
    else if (key == "x_right")
        x_right = parse::real(key, value);
    else if (key == "n_cells")
        n_cells = parse::count(key, value);
    else if (key == "n_particles_total")
        n_particles_total = parse::count(key, value);
    else if (key == "n_ensemble")
        n_ensemble = parse::count(key, value);
    else if (key == "cfl")
        cfl = parse::real(key, value);
    else if (key == "t_final")
        t_final = parse::real(key, value);
    else if (key == "newton_tol")
        newton_tol = parse::real(key, value);
    else if (key == "newton_max_iter")
        newton_max_iter = parse::integer(key, value);
    else if (key == "kernel_width")
        kernel_width = parse::real(key, value);
    else if (key == "base_seed")
        base_seed = parse::u64(key, value);
    else if (key == "poisson_mode")
        poisson_mode = parse_poisson_mode(value);
    else
        return false;
    return true;
}

double derive_time_step(double cfl, double h, double u0_max)
{
    if (!std::isfinite(cfl) || !std::isfinite(h) || !std::isfinite(u0_max))
        throw InputError("derive_time_step: non-finite input");
    if (!(cfl > 0.0 && cfl < 1.0))
        throw InputError("derive_time_step: cfl must lie in (0, 1)");
    if (!(h > 0.0))
        throw InputError("derive_time_step: h must be > 0");
    if (u0_max < 0.0)
        throw InputError("derive_time_step: u0_max must be >= 0");
    constexpr double u_floor = 1.0;
    return cfl * h / std::max(u0_max, u_floor);
}

namespace {

constexpr std::uint64_t splitmix(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t run_seed(std::uint64_t base_seed, std::uint64_t run_index, std::uint64_t sample_index)
{
    std::uint64_t s = splitmix(base_seed);
    s = splitmix(s ^ splitmix(run_index + 0x51ed270b27cd4a3bULL));
    s = splitmix(s + 0xd6e8feb86659fd93ULL * (sample_index + 1));
    return s;
}

std::string fnv1a_hex(std::string_view text)
{
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

double l2_norm(std::span<const double> v, double h)
{
    double sum = 0.0;
    for (double x : v)
        sum += x * x;
    return std::sqrt(h * sum);
}

} // namespace appic
