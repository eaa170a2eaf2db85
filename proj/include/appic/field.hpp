#ifndef APPIC_FIELD_HPP
#define APPIC_FIELD_HPP

#include "appic/core.hpp"
#include "appic/particles.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace appic {

/// Symmetric periodic weighted Laplacian
///   (A phi)_i = a_{i-1} (phi_i - phi_{i-1}) + a_i (phi_i - phi_{i+1}),
/// where a_i couples cell i to cell i+1 and indices wrap. Rows sum to zero and
/// A is positive semidefinite whenever every a_i >= 0.
class CyclicOperator
{
public:
    explicit CyclicOperator(std::vector<double> edge_coefficients);

    std::size_t size() const noexcept { return edges_.size(); }
    double edge(std::size_t i) const { return edges_.at(i); }
    const std::vector<double>& edges() const noexcept { return edges_; }
    double diagonal(std::size_t i) const;

    std::vector<double> apply(std::span<const double> phi) const;

    /// More than one vanishing edge disconnects the periodic chain, so the null
    /// space is larger than the constants.
    bool is_degenerate() const noexcept;

private:
    std::vector<double> edges_;
};

/// Solves (A + diag(shift)) x = rhs for strictly positive shift. Thomas elimination
/// with the periodic corner removed by a Sherman-Morrison rank-one correction.
std::vector<double> solve_shifted(const CyclicOperator& A, std::span<const double> shift,
                                  std::span<const double> rhs);

/// a_i = (eps^2 + dt^2 n_i) / h^2.
CyclicOperator build_operator(const MomentSet& moments, const Grid& grid, double dt, double epsilon);

/// b_i = dt^2 (S_{i+1} - 2 S_i + S_{i-1}) / h^2 + n_i - dt (J_i - J_{i-1}) / h.
std::vector<double> assemble_rhs(const MomentSet& moments, const Grid& grid, double dt);

struct NewtonResult
{
    std::vector<double> phi;
    int iterations = 0;
    double residual = 0.0;
};

struct NewtonSettings
{
    double tolerance = 1e-8;
    int max_iterations = 50;
    /// Cell width used in the discrete L2 norms.
    double h = 1.0;
};

/// Largest |phi| accepted before e^phi is considered to overflow.
inline constexpr double phi_overflow_limit = 700.0;

/// Newton iteration on F(phi) = A phi + e^phi - b with Jacobian A + diag(e^phi).
/// Stops once ||phi^{l+1} - phi^l||_{L2} <= tolerance. Steps that would leave
/// |phi| <= 700 are halved before giving up.
NewtonResult solve_poisson_newton(const CyclicOperator& A, std::span<const double> b,
                                  std::span<const double> phi_init, const NewtonSettings& settings);

/// Linearized single solve (A + I) phi = b + phi_prev - e^{phi_prev}.
std::vector<double> solve_poisson_penalty(const CyclicOperator& A, std::span<const double> b,
                                          std::span<const double> phi_prev);

/// F(phi) = A phi + e^phi - b.
std::vector<double> poisson_residual(const CyclicOperator& A, std::span<const double> b,
                                     std::span<const double> phi);

/// E_i = -(phi_{i+1} - phi_{i-1}) / (2h), periodic.
std::vector<double> electric_field(std::span<const double> phi, const Grid& grid);

/// The limiting (epsilon = 0) field solve with either nonlinear treatment.
/// `mode` must be newton or penalty.
NewtonResult quasineutral_solve(const MomentSet& moments, const Grid& grid, double dt, PoissonMode mode,
                                std::span<const double> phi_prev, const NewtonSettings& settings);

} // namespace appic

#endif // APPIC_FIELD_HPP
