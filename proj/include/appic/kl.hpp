#ifndef APPIC_KL_HPP
#define APPIC_KL_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace appic {

/// One retained term of a truncated Karhunen-Loeve expansion on a periodic domain.
struct KlMode
{
    enum class Kind { constant, cosine, sine };

    Kind kind = Kind::constant;
    int frequency = 0;
    double lambda = 0.0;
};

/// Squared-exponential covariance sigma^2 exp(-d^2 / l^2) expanded in the
/// trigonometric eigenbasis of [x_left, x_left + domain_length).
struct KlSettings
{
    double sigma = 1.0 / 15.0;
    double correlation_length = 0.5;
    double domain_length = 6.283185307179586;
    double lambda_cut = 1e-6;
    double x_left = 0.0;
};

class KlField
{
public:
    KlField(KlSettings settings, std::vector<KlMode> modes, std::function<double(double)> mean);

    const KlSettings& settings() const noexcept { return settings_; }
    const std::vector<KlMode>& modes() const noexcept { return modes_; }
    /// Truncation dimension (number of retained modes).
    std::size_t dimension() const noexcept { return modes_.size(); }

    double mean(double x) const { return mean_(x); }
    /// Orthonormal eigenfunction of mode j evaluated at x.
    double eigenfunction(std::size_t j, double x) const;
    /// Zero-mean part sum_j sqrt(lambda_j) z_j phi_j(x).
    double fluctuation(std::span<const double> z, double x) const;
    /// mean(x) + fluctuation(z, x).
    double density(std::span<const double> z, double x) const;

private:
    KlSettings settings_;
    std::vector<KlMode> modes_;
    std::function<double(double)> mean_;
};

/// Covariance function c(d) = sigma^2 exp(-d^2 / l^2).
double squared_exponential_covariance(double sigma, double length, double d);

/// Builds the truncated expansion: eigenvalues by adaptive Gauss-Kronrod quadrature
/// of c(x) against each trigonometric mode over one period, keeping lambda > lambda_cut,
/// sorted non-increasing. Throws SolverError if a quadrature misses 1e-10 absolute.
KlField kl_build(const KlSettings& settings, std::function<double(double)> mean);

/// Evaluates n0(x, z) at each x. Throws NonPositiveDensity if any value is <= 0
/// and InputError if z has the wrong length.
std::vector<double> kl_sample(const KlField& field, std::span<const double> z, std::span<const double> xs);

/// Mean profile (1.5 + 0.2 cos 2x + 0.1 cos 4x) / (3 pi); integrates to 1 over [0, 2 pi].
double kl_test3_mean(double x);

} // namespace appic

#endif // APPIC_KL_HPP
