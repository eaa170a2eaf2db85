#ifndef APPIC_INITIAL_CONDITION_HPP
#define APPIC_INITIAL_CONDITION_HPP

#include "appic/core.hpp"
#include "appic/kl.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace appic {

/// Cold (monokinetic) beam f = n(x) delta(v - u(x)).
struct Beam
{
    std::function<double(double)> density;
    std::function<double(double)> velocity;
};

enum class IcKind { single_beam, double_beam, kl_beam };

struct InitialCondition
{
    std::string name;
    IcKind kind = IcKind::single_beam;
    std::vector<Beam> beams;
    double x_left = 0.0;
    double x_right = 1.0;

    /// Total density summed over beams.
    double density(double x) const;
    /// Total momentum sum_b n_b u_b.
    double momentum(double x) const;
    /// max_b max_x |u_b(x)| over the given points.
    double max_speed(std::span<const double> xs) const;
    /// Smallest beam density over the given points.
    double min_density(std::span<const double> xs) const;
};

InitialCondition make_equilibrium(double x_left = 0.0, double x_right = 1.0);

/// n0 = 1 + 0.5 sin(2 pi x), u0 = 0.4 cos(2 pi x) on [0, 1].
InitialCondition make_ap_test();

/// Five uniform parameters perturbing 1 + 0.5 cos(2 pi x); u0 = 0.2 sin(2 pi x).
InitialCondition make_uq_test1(std::span<const double> z);

/// Two cold beams with five shared uniform parameters.
InitialCondition make_uq_test2(std::span<const double> z);

/// KL random density on [0, 2 pi) with u0 = sin(x).
InitialCondition make_uq_test3(std::shared_ptr<const KlField> field, std::span<const double> z);

/// Parametrized IC family for uncertainty propagation.
struct IcFamily
{
    enum class Distribution { uniform_symmetric, standard_normal };

    std::string name;
    std::size_t dimension = 0;
    Distribution distribution = Distribution::uniform_symmetric;
    double x_left = 0.0;
    double x_right = 1.0;
    std::function<InitialCondition(std::span<const double>)> make;
};

/// Known names: ap-test, equilibrium (dimension 0), uq-test1, uq-test2, uq-test3-kl.
/// The KL settings are used only by uq-test3-kl.
IcFamily make_ic_family(const std::string& name, const KlSettings& kl = {});

/// Draws `count` parameter vectors. Draws whose IC is not strictly positive on every
/// point of `check_points` are redrawn, at most 20 times per sample.
std::vector<std::vector<double>> sample_parameters(const IcFamily& family, std::size_t count,
                                                   std::uint64_t stream_seed,
                                                   std::span<const std::vector<double>> check_points);

} // namespace appic

#endif // APPIC_INITIAL_CONDITION_HPP
