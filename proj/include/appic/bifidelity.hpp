#ifndef APPIC_BIFIDELITY_HPP
#define APPIC_BIFIDELITY_HPP

#include "appic/core.hpp"
#include "appic/euler.hpp"
#include "appic/initial_condition.hpp"
#include "appic/simulation.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace appic {

/// Solution columns over a parameter sample set. Every column stacks the n and u
/// grid vectors of one model at the final time; `weight` is that model's cell width,
/// so inner products are discrete L2 products.
class SnapshotMatrix
{
public:
    SnapshotMatrix() = default;
    explicit SnapshotMatrix(double weight) : weight_(weight) {}

    void add(std::vector<double> column);

    std::size_t cols() const noexcept { return columns_.size(); }
    std::size_t rows() const noexcept { return columns_.empty() ? 0 : columns_.front().size(); }
    double weight() const noexcept { return weight_; }
    const std::vector<double>& column(std::size_t i) const { return columns_.at(i); }
    const std::vector<std::vector<double>>& columns() const noexcept { return columns_; }

    double inner(std::span<const double> a, std::span<const double> b) const;

private:
    double weight_ = 1.0;
    std::vector<std::vector<double>> columns_;
};

struct GreedyResult
{
    std::vector<std::size_t> selected;
    /// Residual norm of each pivot at the moment it was picked; non-increasing.
    std::vector<double> residual_norms;
};

/// Column-pivoted Gram-Schmidt: repeatedly takes the column farthest from the span of
/// those already chosen (lowest index on ties). Stops early once the largest residual
/// drops below 1e-13 times the first pivot norm.
GreedyResult greedy_select(const SnapshotMatrix& low, std::size_t r_max);

class BifiSurrogate
{
public:
    BifiSurrogate(std::vector<std::vector<double>> points, SnapshotMatrix low, SnapshotMatrix high);

    std::size_t size() const noexcept { return points_.size(); }
    const std::vector<std::vector<double>>& points() const noexcept { return points_; }
    const SnapshotMatrix& low() const noexcept { return low_; }
    const SnapshotMatrix& high() const noexcept { return high_; }
    const Eigen::MatrixXd& gramian() const noexcept { return gramian_; }
    double ridge() const noexcept { return ridge_; }
    double condition_number() const;

    /// The surrogate built from the first r selected points.
    BifiSurrogate truncated(std::size_t r) const;

private:
    std::vector<std::vector<double>> points_;
    SnapshotMatrix low_;
    SnapshotMatrix high_;
    Eigen::MatrixXd gramian_;
    double ridge_ = 0.0;
};

/// Galerkin coefficients: (G + rho I) c = f, f_k = <U^L(z), U^L(z_k)>, rho = 1e-12 tr(G) / r.
std::vector<double> lf_coefficients(const BifiSurrogate& surrogate, std::span<const double> low_column);

/// U^B = sum_k c_k U^H(z_k).
std::vector<double> bifi_reconstruct(const BifiSurrogate& surrogate, std::span<const double> c);

struct QuantityErrors
{
    double n = 0.0;
    double u = 0.0;
};

/// Mean over the validation samples of the discrete L2(D) distance, split into the
/// n half and the u half of each column. `h` is the high-fidelity cell width.
QuantityErrors mean_l2_distance(const SnapshotMatrix& approx, const SnapshotMatrix& reference, double h);

/// Surrogate error against high-fidelity references at independently drawn points.
QuantityErrors validation_error(const BifiSurrogate& surrogate, const SnapshotMatrix& low_validation,
                                const SnapshotMatrix& high_reference);

/// Concatenated (n, u) of the ensemble-averaged final frame.
std::vector<double> hf_snapshot(const SimParams& params, const InitialCondition& ic, std::size_t threads = 1);
/// Concatenated (n, u) of the final Lax-Friedrichs frame.
std::vector<double> lf_snapshot(const EulerParams& params, const InitialCondition& ic);

/// Low-fidelity snapshots moved to the high-fidelity cell centers (diagnostics only).
std::vector<double> lf_on_hf_grid(std::span<const double> low_column, const EulerParams& lf,
                                  const InitialCondition& ic, const Grid& hf_grid);

SnapshotMatrix lf_snapshots(const IcFamily& family, const EulerParams& params,
                            std::span<const std::vector<double>> points, std::size_t threads = 1);
SnapshotMatrix hf_snapshots(const IcFamily& family, const SimParams& params,
                            std::span<const std::vector<double>> points, std::size_t threads = 1);

struct SurrogateBuild
{
    BifiSurrogate surrogate;
    GreedyResult greedy;
    SnapshotMatrix training_low;
};

/// Low-fidelity sweep over the training set, greedy selection of up to r points,
/// ensemble-averaged high-fidelity runs at the selected points only.
SurrogateBuild build_surrogate(const IcFamily& family, const SimParams& hf, const EulerParams& lf,
                               std::span<const std::vector<double>> training, std::size_t r,
                               std::size_t threads = 1);

void write_surrogate_archive(const std::filesystem::path& path, const BifiSurrogate& surrogate,
                             const std::string& provenance);
BifiSurrogate read_surrogate_archive(const std::filesystem::path& path, std::string* provenance = nullptr);

} // namespace appic

#endif // APPIC_BIFIDELITY_HPP
