#include "appic/initial_condition.hpp"

#include "appic/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace appic {

using std::numbers::pi;

double InitialCondition::density(double x) const
{
    double sum = 0.0;
    for (const auto& b : beams)
        sum += b.density(x);
    return sum;
}

double InitialCondition::momentum(double x) const
{
    double sum = 0.0;
    for (const auto& b : beams)
        sum += b.density(x) * b.velocity(x);
    return sum;
}

double InitialCondition::max_speed(std::span<const double> xs) const
{
    double m = 0.0;
    for (const auto& b : beams)
        for (double x : xs)
            m = std::max(m, std::abs(b.velocity(x)));
    return m;
}

double InitialCondition::min_density(std::span<const double> xs) const
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto& b : beams)
        for (double x : xs)
            m = std::min(m, b.density(x));
    return m;
}

namespace {

std::array<double, 5> five(std::span<const double> z, const char* who)
{
    if (z.size() != 5)
        throw InputError(std::string(who) + " expects a 5-dimensional parameter vector");
    return {z[0], z[1], z[2], z[3], z[4]};
}

} // namespace

InitialCondition make_equilibrium(double x_left, double x_right)
{
    InitialCondition ic;
    ic.name = "equilibrium";
    ic.kind = IcKind::single_beam;
    ic.beams.push_back({[](double) { return 1.0; }, [](double) { return 0.0; }});
    ic.x_left = x_left;
    ic.x_right = x_right;
    return ic;
}

InitialCondition make_ap_test()
{
    InitialCondition ic;
    ic.name = "ap-test";
    ic.kind = IcKind::single_beam;
    ic.beams.push_back({[](double x) { return 1.0 + 0.5 * std::sin(2.0 * pi * x); },
                        [](double x) { return 0.4 * std::cos(2.0 * pi * x); }});
    return ic;
}

InitialCondition make_uq_test1(std::span<const double> z)
{
    const auto p = five(z, "uq-test1");
    // Perturbations collapse onto one cosine and one sine amplitude.
    const double ca = p[0] / (pi * pi) + p[2] / (9.0 * pi * pi) + p[4] / (25.0 * pi * pi);
    const double sa = p[1] / (4.0 * pi * pi) + p[3] / (16.0 * pi * pi);
    InitialCondition ic;
    ic.name = "uq-test1";
    ic.kind = IcKind::single_beam;
    ic.beams.push_back({[ca, sa](double x) {
                            const double c = std::cos(2.0 * pi * x);
                            const double s = std::sin(2.0 * pi * x);
                            return 1.0 + 0.5 * c + ca * c + sa * s;
                        },
                        [](double x) { return 0.2 * std::sin(2.0 * pi * x); }});
    return ic;
}

InitialCondition make_uq_test2(std::span<const double> z)
{
    const auto p = five(z, "uq-test2");
    double amp = 0.0;
    for (int i = 0; i < 5; ++i)
        amp += p[i] / ((i + 1) * (i + 1) * pi * pi);
    InitialCondition ic;
    ic.name = "uq-test2";
    ic.kind = IcKind::double_beam;
    ic.beams.push_back({[amp](double x) {
                            const double c = std::cos(2.0 * pi * x + pi / 3.0);
                            return 1.0 - 0.6 * c * c + amp * std::cos(2.0 * pi * x);
                        },
                        [](double x) { return 0.2 * std::sin(2.0 * pi * x); }});
    ic.beams.push_back({[amp](double x) {
                            return 1.0 + 0.4 * std::sin(2.0 * pi * x - pi / 4.0) + amp * std::sin(2.0 * pi * x);
                        },
                        [](double x) { return 0.1 * std::cos(2.0 * pi * x); }});
    return ic;
}

InitialCondition make_uq_test3(std::shared_ptr<const KlField> field, std::span<const double> z)
{
    if (!field)
        throw InputError("uq-test3-kl needs a KL field");
    if (z.size() != field->dimension())
        throw InputError("uq-test3-kl parameter vector has the wrong dimension");
    std::vector<double> coeffs(z.begin(), z.end());
    InitialCondition ic;
    ic.name = "uq-test3-kl";
    ic.kind = IcKind::kl_beam;
    ic.beams.push_back({[field, coeffs](double x) { return field->density(coeffs, x); },
                        [](double x) { return std::sin(x); }});
    ic.x_left = field->settings().x_left;
    ic.x_right = field->settings().x_left + field->settings().domain_length;
    return ic;
}

IcFamily make_ic_family(const std::string& name, const KlSettings& kl)
{
    IcFamily fam;
    fam.name = name;
    if (name == "ap-test") {
        fam.dimension = 0;
        fam.make = [](std::span<const double>) { return make_ap_test(); };
    } else if (name == "equilibrium") {
        fam.dimension = 0;
        fam.make = [](std::span<const double>) { return make_equilibrium(); };
    } else if (name == "uq-test1") {
        fam.dimension = 5;
        fam.make = [](std::span<const double> z) { return make_uq_test1(z); };
    } else if (name == "uq-test2") {
        fam.dimension = 5;
        fam.make = [](std::span<const double> z) { return make_uq_test2(z); };
    } else if (name == "uq-test3-kl") {
        auto field = std::make_shared<const KlField>(kl_build(kl, kl_test3_mean));
        fam.dimension = field->dimension();
        fam.distribution = IcFamily::Distribution::standard_normal;
        fam.x_left = kl.x_left;
        fam.x_right = kl.x_left + kl.domain_length;
        fam.make = [field](std::span<const double> z) { return make_uq_test3(field, z); };
    } else {
        throw ConfigError("unknown initial condition '" + name + "'");
    }
    return fam;
}

std::vector<std::vector<double>> sample_parameters(const IcFamily& family, std::size_t count,
                                                   std::uint64_t stream_seed,
                                                   std::span<const std::vector<double>> check_points)
{
    constexpr int max_attempts = 20;
    std::vector<std::vector<double>> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        bool accepted = false;
        for (int attempt = 0; attempt < max_attempts && !accepted; ++attempt) {
            std::mt19937_64 rng(run_seed(stream_seed, static_cast<std::uint64_t>(attempt), i));
            std::vector<double> z(family.dimension);
            if (family.distribution == IcFamily::Distribution::uniform_symmetric) {
                for (auto& v : z)
                    v = 2.0 * to_unit_interval(rng()) - 1.0;
            } else {
                std::normal_distribution<double> normal(0.0, 1.0);
                for (auto& v : z)
                    v = normal(rng);
            }
            const InitialCondition ic = family.make(z);
            accepted = true;
            for (const auto& xs : check_points)
                if (!(ic.min_density(xs) > 0.0))
                    accepted = false;
            if (accepted)
                out.push_back(std::move(z));
        }
        if (!accepted)
            throw NonPositiveDensity("sample " + std::to_string(i) + " of '" + family.name +
                                     "' stayed non-positive after 20 draws");
    }
    return out;
}

} // namespace appic
