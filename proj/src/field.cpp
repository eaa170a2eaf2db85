#include "appic/field.hpp"

#include "appic/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace appic {

CyclicOperator::CyclicOperator(std::vector<double> edge_coefficients) : edges_(std::move(edge_coefficients))
{
    if (edges_.size() < 2)
        throw InputError("CyclicOperator needs at least 2 cells");
    for (double a : edges_)
        if (!std::isfinite(a) || a < 0.0)
            throw InputError("CyclicOperator edge coefficients must be finite and >= 0");
}

double CyclicOperator::diagonal(std::size_t i) const
{
    const std::size_t n = edges_.size();
    return edges_[(i + n - 1) % n] + edges_[i];
}

std::vector<double> CyclicOperator::apply(std::span<const double> phi) const
{
    const std::size_t n = edges_.size();
    if (phi.size() != n)
        throw InputError("CyclicOperator::apply: size mismatch");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ip = i + 1 == n ? 0 : i + 1;
        const std::size_t im = i == 0 ? n - 1 : i - 1;
        out[i] = edges_[im] * (phi[i] - phi[im]) + edges_[i] * (phi[i] - phi[ip]);
    }
    return out;
}

bool CyclicOperator::is_degenerate() const noexcept
{
    return std::count(edges_.begin(), edges_.end(), 0.0) >= 2;
}

namespace {

// Plain Thomas elimination; sub[0] and sup[n-1] are ignored.
void thomas(std::span<const double> sub, std::span<const double> diag, std::span<const double> sup,
            std::span<const double> rhs, std::span<double> x, std::vector<double>& scratch)
{
    const std::size_t n = diag.size();
    scratch.resize(n);
    double beta = diag[0];
    x[0] = rhs[0] / beta;
    for (std::size_t i = 1; i < n; ++i) {
        scratch[i] = sup[i - 1] / beta;
        beta = diag[i] - sub[i] * scratch[i];
        x[i] = (rhs[i] - sub[i] * x[i - 1]) / beta;
    }
    for (std::size_t i = n - 1; i-- > 0;)
        x[i] -= scratch[i + 1] * x[i + 1];
}

} // namespace

std::vector<double> solve_shifted(const CyclicOperator& A, std::span<const double> shift,
                                  std::span<const double> rhs)
{
    const std::size_t n = A.size();
    if (shift.size() != n || rhs.size() != n)
        throw InputError("solve_shifted: size mismatch");
    for (double s : shift)
        if (!(s > 0.0) || !std::isfinite(s))
            throw InputError("solve_shifted: shift must be finite and > 0");
    const auto& a = A.edges();

    if (n == 2) {
        // The corner and the off-diagonal coincide.
        const double off = -(a[0] + a[1]);
        const double d0 = a[0] + a[1] + shift[0];
        const double d1 = a[0] + a[1] + shift[1];
        const double det = d0 * d1 - off * off;
        return {(d1 * rhs[0] - off * rhs[1]) / det, (d0 * rhs[1] - off * rhs[0]) / det};
    }

    std::vector<double> sub(n), diag(n), sup(n);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i] = A.diagonal(i) + shift[i];
        sub[i] = i > 0 ? -a[i - 1] : 0.0;
        sup[i] = i + 1 < n ? -a[i] : 0.0;
    }
    const double corner = -a[n - 1]; // both A(0, n-1) and A(n-1, 0)

    const double gamma = -diag[0];
    diag[0] -= gamma;
    diag[n - 1] -= corner * corner / gamma;

    std::vector<double> scratch;
    std::vector<double> x(n), z(n), u(n, 0.0);
    thomas(sub, diag, sup, rhs, x, scratch);
    u[0] = gamma;
    u[n - 1] = corner;
    thomas(sub, diag, sup, u, z, scratch);

    const double fact = (x[0] + corner * x[n - 1] / gamma) / (1.0 + z[0] + corner * z[n - 1] / gamma);
    for (std::size_t i = 0; i < n; ++i)
        x[i] -= fact * z[i];
    return x;
}

CyclicOperator build_operator(const MomentSet& moments, const Grid& grid, double dt, double epsilon)
{
    const std::size_t n = grid.size();
    if (moments.size() != n)
        throw InputError("build_operator: moment size does not match the grid");
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    const double eps2 = epsilon * epsilon;
    std::vector<double> edges(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (moments.n[i] < 0.0)
            throw InputError("build_operator: negative density");
        edges[i] = (eps2 + dt * dt * moments.n[i]) * inv_h2;
    }
    return CyclicOperator(std::move(edges));
}

std::vector<double> assemble_rhs(const MomentSet& moments, const Grid& grid, double dt)
{
    const std::size_t n = grid.size();
    if (moments.size() != n)
        throw InputError("assemble_rhs: moment size does not match the grid");
    const double h = grid.h();
    const double flux_scale = dt * dt / (h * h);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ip = grid.next(i);
        const std::size_t im = grid.prev(i);
        b[i] = flux_scale * (moments.S[ip] - 2.0 * moments.S[i] + moments.S[im]) + moments.n[i] -
               dt * (moments.J[i] - moments.J[im]) / h;
    }
    return b;
}

std::vector<double> poisson_residual(const CyclicOperator& A, std::span<const double> b,
                                     std::span<const double> phi)
{
    std::vector<double> f = A.apply(phi);
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] += std::exp(phi[i]) - b[i];
    return f;
}

namespace {

bool within_overflow_limit(std::span<const double> phi)
{
    return std::all_of(phi.begin(), phi.end(),
                       [](double p) { return std::isfinite(p) && std::abs(p) <= phi_overflow_limit; });
}

} // namespace

NewtonResult solve_poisson_newton(const CyclicOperator& A, std::span<const double> b,
                                  std::span<const double> phi_init, const NewtonSettings& settings)
{
    const std::size_t n = A.size();
    if (b.size() != n || phi_init.size() != n)
        throw InputError("solve_poisson_newton: size mismatch");
    for (double v : b)
        if (!std::isfinite(v))
            throw InputError("solve_poisson_newton: non-finite right-hand side");
    if (!within_overflow_limit(phi_init))
        throw SolverError("solve_poisson_newton: initial guess exceeds the overflow limit");

    NewtonResult result;
    result.phi.assign(phi_init.begin(), phi_init.end());
    std::vector<double> expo(n), candidate(n), diff(n);
    double residual = 0.0;

    for (int it = 1; it <= settings.max_iterations; ++it) {
        std::vector<double> F = poisson_residual(A, b, result.phi);
        residual = l2_norm(F, settings.h);
        for (std::size_t i = 0; i < n; ++i)
            expo[i] = std::exp(result.phi[i]);
        const std::vector<double> delta = solve_shifted(A, expo, F);

        double step = 1.0;
        constexpr int max_halvings = 40;
        int halvings = 0;
        for (;;) {
            for (std::size_t i = 0; i < n; ++i)
                candidate[i] = result.phi[i] - step * delta[i];
            if (within_overflow_limit(candidate))
                break;
            if (++halvings > max_halvings)
                throw SolverError("Newton step overflows e^phi even after damping", residual);
            step *= 0.5;
        }

        for (std::size_t i = 0; i < n; ++i)
            diff[i] = candidate[i] - result.phi[i];
        result.phi.swap(candidate);
        result.iterations = it;
        if (halvings == 0 && l2_norm(diff, settings.h) <= settings.tolerance) {
            result.residual = l2_norm(poisson_residual(A, b, result.phi), settings.h);
            return result;
        }
    }
    residual = l2_norm(poisson_residual(A, b, result.phi), settings.h);
    throw SolverError("Newton iteration did not converge in " + std::to_string(settings.max_iterations) +
                          " iterations (residual " + std::to_string(residual) + ")",
                      residual);
}

std::vector<double> solve_poisson_penalty(const CyclicOperator& A, std::span<const double> b,
                                          std::span<const double> phi_prev)
{
    const std::size_t n = A.size();
    if (b.size() != n || phi_prev.size() != n)
        throw InputError("solve_poisson_penalty: size mismatch");
    if (!within_overflow_limit(phi_prev))
        throw SolverError("solve_poisson_penalty: previous potential exceeds the overflow limit");
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i)
        rhs[i] = b[i] + phi_prev[i] - std::exp(phi_prev[i]);
    const std::vector<double> ones(n, 1.0);
    std::vector<double> phi = solve_shifted(A, ones, rhs);
    if (!within_overflow_limit(phi))
        throw SolverError("solve_poisson_penalty: potential exceeds the overflow limit");
    return phi;
}

std::vector<double> electric_field(std::span<const double> phi, const Grid& grid)
{
    const std::size_t n = grid.size();
    if (phi.size() != n)
        throw InputError("electric_field: size mismatch");
    const double inv_2h = 0.5 / grid.h();
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i)
        e[i] = -(phi[grid.next(i)] - phi[grid.prev(i)]) * inv_2h;
    return e;
}

NewtonResult quasineutral_solve(const MomentSet& moments, const Grid& grid, double dt, PoissonMode mode,
                                std::span<const double> phi_prev, const NewtonSettings& settings)
{
    const CyclicOperator A = build_operator(moments, grid, dt, 0.0);
    const std::vector<double> b = assemble_rhs(moments, grid, dt);
    switch (mode) {
    case PoissonMode::newton: return solve_poisson_newton(A, b, phi_prev, settings);
    case PoissonMode::penalty: {
        NewtonResult r;
        r.phi = solve_poisson_penalty(A, b, phi_prev);
        r.iterations = 1;
        r.residual = l2_norm(poisson_residual(A, b, r.phi), settings.h);
        return r;
    }
    case PoissonMode::quasineutral: break;
    }
    throw InputError("quasineutral_solve: mode must be newton or penalty");
}

} // namespace appic
