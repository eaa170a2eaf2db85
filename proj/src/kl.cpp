#include "appic/kl.hpp"

#include "appic/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace appic {

KlField::KlField(KlSettings settings, std::vector<KlMode> modes, std::function<double(double)> mean)
    : settings_(settings), modes_(std::move(modes)), mean_(std::move(mean))
{
    if (!mean_)
        mean_ = [](double) { return 0.0; };
}

double KlField::eigenfunction(std::size_t j, double x) const
{
    const KlMode& m = modes_.at(j);
    const double len = settings_.domain_length;
    const double arg = 2.0 * std::numbers::pi * m.frequency * (x - settings_.x_left) / len;
    switch (m.kind) {
    case KlMode::Kind::constant: return std::sqrt(1.0 / len);
    case KlMode::Kind::cosine: return std::sqrt(2.0 / len) * std::cos(arg);
    case KlMode::Kind::sine: return std::sqrt(2.0 / len) * std::sin(arg);
    }
    return 0.0;
}

double KlField::fluctuation(std::span<const double> z, double x) const
{
    if (z.size() != modes_.size())
        throw InputError("KL coefficient vector has length " + std::to_string(z.size()) + ", expected " +
                         std::to_string(modes_.size()));
    double sum = 0.0;
    for (std::size_t j = 0; j < modes_.size(); ++j)
        sum += std::sqrt(modes_[j].lambda) * z[j] * eigenfunction(j, x);
    return sum;
}

double KlField::density(std::span<const double> z, double x) const
{
    return mean_(x) + fluctuation(z, x);
}

double squared_exponential_covariance(double sigma, double length, double d)
{
    return sigma * sigma * std::exp(-(d * d) / (length * length));
}

namespace {

double integrate_mode(const KlSettings& s, int frequency)
{
    const double half = 0.5 * s.domain_length;
    const double omega = 2.0 * std::numbers::pi * frequency / s.domain_length;
    auto integrand = [&](double x) {
        return squared_exponential_covariance(s.sigma, s.correlation_length, x) * std::cos(omega * x);
    };
    double error = 0.0;
    // The integrand is even; integrate one half to halve the cost.
    const double value = 2.0 * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                                   integrand, 0.0, half, 20, 1e-14, &error);
    if (!std::isfinite(value) || 2.0 * error > 1e-10)
        throw SolverError("KL eigenvalue quadrature did not reach 1e-10 for frequency " +
                          std::to_string(frequency));
    return value;
}

} // namespace

KlField kl_build(const KlSettings& settings, std::function<double(double)> mean)
{
    if (!(settings.sigma > 0.0) || !(settings.correlation_length > 0.0) || !(settings.domain_length > 0.0))
        throw InputError("kl_build: sigma, correlation length and domain length must be > 0");
    if (!(settings.lambda_cut >= 0.0))
        throw InputError("kl_build: lambda_cut must be >= 0");

    std::vector<KlMode> modes;
    const double lambda0 = integrate_mode(settings, 0);
    if (lambda0 > settings.lambda_cut)
        modes.push_back({KlMode::Kind::constant, 0, lambda0});

    // The spectrum of a squared-exponential kernel decays monotonically in frequency.
    constexpr int max_frequency = 100000;
    for (int k = 1; k <= max_frequency; ++k) {
        const double lambda = integrate_mode(settings, k);
        if (!(lambda > settings.lambda_cut))
            break;
        modes.push_back({KlMode::Kind::cosine, k, lambda});
        modes.push_back({KlMode::Kind::sine, k, lambda});
        if (k == max_frequency)
            throw SolverError("kl_build: spectrum did not drop below lambda_cut");
    }

    std::stable_sort(modes.begin(), modes.end(),
                     [](const KlMode& a, const KlMode& b) { return a.lambda > b.lambda; });
    return KlField(settings, std::move(modes), std::move(mean));
}

std::vector<double> kl_sample(const KlField& field, std::span<const double> z, std::span<const double> xs)
{
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out[i] = field.density(z, xs[i]);
        if (!(out[i] > 0.0))
            throw NonPositiveDensity("KL density sample is non-positive at x = " + std::to_string(xs[i]));
    }
    return out;
}

double kl_test3_mean(double x)
{
    constexpr double s = 3.0 * std::numbers::pi;
    return (1.5 + 0.2 * std::cos(2.0 * x) + 0.1 * std::cos(4.0 * x)) / s;
}

} // namespace appic
