#include "appic/bifidelity.hpp"

#include "appic/error.hpp"
#include "appic/parallel.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <string>

namespace appic {

void SnapshotMatrix::add(std::vector<double> column)
{
    if (!columns_.empty() && column.size() != rows())
        throw InputError("snapshot column length differs from earlier columns");
    for (double v : column)
        if (!std::isfinite(v))
            throw InputError("snapshot column contains a non-finite value");
    columns_.push_back(std::move(column));
}

double SnapshotMatrix::inner(std::span<const double> a, std::span<const double> b) const
{
    if (a.size() != b.size())
        throw InputError("snapshot inner product: size mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        sum += a[i] * b[i];
    return weight_ * sum;
}

GreedyResult greedy_select(const SnapshotMatrix& low, std::size_t r_max)
{
    const std::size_t m = low.cols();
    if (r_max < 1 || r_max > m)
        throw InputError("greedy_select: need 1 <= r_max <= number of columns");

    std::vector<std::vector<double>> residual = low.columns();
    std::vector<bool> taken(m, false);
    GreedyResult out;
    double first_norm = 0.0;

    for (std::size_t stage = 0; stage < r_max; ++stage) {
        std::size_t best = m;
        double best_norm = -1.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (taken[i])
                continue;
            const double norm = std::sqrt(low.inner(residual[i], residual[i]));
            if (norm > best_norm) {
                best_norm = norm;
                best = i;
            }
        }
        if (stage == 0)
            first_norm = best_norm;
        if (best == m || !(best_norm > 1e-13 * first_norm) || best_norm == 0.0)
            break;

        taken[best] = true;
        out.selected.push_back(best);
        out.residual_norms.push_back(best_norm);

        std::vector<double> q = residual[best];
        for (double& v : q)
            v /= best_norm;
        // Two projection passes keep the residuals orthogonal to working precision.
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < m; ++i) {
                if (taken[i])
                    continue;
                const double coef = low.inner(residual[i], q);
                for (std::size_t k = 0; k < q.size(); ++k)
                    residual[i][k] -= coef * q[k];
            }
        }
    }
    return out;
}

BifiSurrogate::BifiSurrogate(std::vector<std::vector<double>> points, SnapshotMatrix low, SnapshotMatrix high)
    : points_(std::move(points)), low_(std::move(low)), high_(std::move(high))
{
    const std::size_t r = points_.size();
    if (r == 0 || low_.cols() != r || high_.cols() != r)
        throw InputError("surrogate needs the same positive number of points, low and high columns");
    gramian_.resize(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double g = low_.inner(low_.column(i), low_.column(j));
            gramian_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g;
            gramian_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = g;
        }
    ridge_ = 1e-12 * gramian_.trace() / static_cast<double>(r);
}

double BifiSurrogate::condition_number() const
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gramian_, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    const double lo = ev.minCoeff();
    const double hi = ev.maxCoeff();
    if (!(lo > 0.0))
        return std::numeric_limits<double>::infinity();
    return hi / lo;
}

BifiSurrogate BifiSurrogate::truncated(std::size_t r) const
{
    if (r < 1 || r > size())
        throw InputError("truncated: r out of range");
    SnapshotMatrix lo(low_.weight());
    SnapshotMatrix hi(high_.weight());
    std::vector<std::vector<double>> pts;
    for (std::size_t i = 0; i < r; ++i) {
        pts.push_back(points_[i]);
        lo.add(low_.column(i));
        hi.add(high_.column(i));
    }
    return BifiSurrogate(std::move(pts), std::move(lo), std::move(hi));
}

std::vector<double> lf_coefficients(const BifiSurrogate& surrogate, std::span<const double> low_column)
{
    const std::size_t r = surrogate.size();
    if (low_column.size() != surrogate.low().rows())
        throw InputError("lf_coefficients: column length does not match the low-fidelity basis");
    for (double v : low_column)
        if (!std::isfinite(v))
            throw InputError("lf_coefficients: non-finite input column");
    Eigen::VectorXd f(static_cast<Eigen::Index>(r));
    for (std::size_t k = 0; k < r; ++k)
        f(static_cast<Eigen::Index>(k)) = surrogate.low().inner(low_column, surrogate.low().column(k));
    Eigen::MatrixXd system = surrogate.gramian();
    system.diagonal().array() += surrogate.ridge();
    Eigen::LLT<Eigen::MatrixXd> llt(system);
    Eigen::VectorXd c;
    if (llt.info() == Eigen::Success)
        c = llt.solve(f);
    else
        c = system.ldlt().solve(f);
    return {c.data(), c.data() + c.size()};
}

std::vector<double> bifi_reconstruct(const BifiSurrogate& surrogate, std::span<const double> c)
{
    if (c.size() != surrogate.size())
        throw InputError("bifi_reconstruct: coefficient count does not match the surrogate");
    std::vector<double> out(surrogate.high().rows(), 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
        const auto& col = surrogate.high().column(k);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] += c[k] * col[i];
    }
    return out;
}

QuantityErrors mean_l2_distance(const SnapshotMatrix& approx, const SnapshotMatrix& reference, double h)
{
    if (approx.cols() != reference.cols() || approx.rows() != reference.rows() || approx.cols() == 0)
        throw InputError("mean_l2_distance: dimension mismatch");
    if (approx.rows() % 2 != 0)
        throw InputError("mean_l2_distance: columns must stack two equal-length quantities");
    const std::size_t half = approx.rows() / 2;
    QuantityErrors e;
    for (std::size_t k = 0; k < approx.cols(); ++k) {
        const auto& a = approx.column(k);
        const auto& b = reference.column(k);
        double sn = 0.0;
        double su = 0.0;
        for (std::size_t i = 0; i < half; ++i) {
            sn += (a[i] - b[i]) * (a[i] - b[i]);
            su += (a[half + i] - b[half + i]) * (a[half + i] - b[half + i]);
        }
        e.n += std::sqrt(h * sn);
        e.u += std::sqrt(h * su);
    }
    e.n /= static_cast<double>(approx.cols());
    e.u /= static_cast<double>(approx.cols());
    return e;
}

QuantityErrors validation_error(const BifiSurrogate& surrogate, const SnapshotMatrix& low_validation,
                                const SnapshotMatrix& high_reference)
{
    if (low_validation.cols() != high_reference.cols())
        throw InputError("validation_error: sample counts differ");
    SnapshotMatrix approx(high_reference.weight());
    for (std::size_t k = 0; k < low_validation.cols(); ++k)
        approx.add(bifi_reconstruct(surrogate, lf_coefficients(surrogate, low_validation.column(k))));
    return mean_l2_distance(approx, high_reference, high_reference.weight());
}

std::vector<double> hf_snapshot(const SimParams& params, const InitialCondition& ic, std::size_t threads)
{
    RunOptions opts;
    opts.record_diagnostics = false;
    opts.threads = threads;
    const EnsembleOutput ens = run_ensemble(params, ic, opts);
    const FieldFrame& f = ens.final_frame();
    std::vector<double> col = f.n;
    col.insert(col.end(), f.u.begin(), f.u.end());
    return col;
}

std::vector<double> lf_snapshot(const EulerParams& params, const InitialCondition& ic)
{
    const EulerOutput out = run_euler(params, ic);
    const EulerFrame& f = out.final_frame();
    std::vector<double> col = f.n;
    col.insert(col.end(), f.u.begin(), f.u.end());
    return col;
}

std::vector<double> lf_on_hf_grid(std::span<const double> low_column, const EulerParams& lf,
                                  const InitialCondition& ic, const Grid& hf_grid)
{
    const std::size_t nl = lf.n_cells;
    if (low_column.size() != 2 * nl)
        throw InputError("lf_on_hf_grid: column length does not match the low-fidelity grid");
    const double h = (ic.x_right - ic.x_left) / static_cast<double>(nl);
    const std::vector<double> xs = hf_grid.centers();
    std::vector<double> n = interpolate_periodic(low_column.subspan(0, nl), ic.x_left, h, xs);
    const std::vector<double> u = interpolate_periodic(low_column.subspan(nl, nl), ic.x_left, h, xs);
    n.insert(n.end(), u.begin(), u.end());
    return n;
}

SnapshotMatrix lf_snapshots(const IcFamily& family, const EulerParams& params,
                            std::span<const std::vector<double>> points, std::size_t threads)
{
    std::vector<std::vector<double>> cols(points.size());
    parallel_for(points.size(), threads, [&](std::size_t i) {
        try {
            cols[i] = lf_snapshot(params, family.make(points[i]));
        } catch (const SolverError& e) {
            throw SolverError("low-fidelity sample " + std::to_string(i) + ": " + e.what());
        }
    });
    SnapshotMatrix out((family.x_right - family.x_left) / static_cast<double>(params.n_cells));
    for (auto& c : cols)
        out.add(std::move(c));
    return out;
}

SnapshotMatrix hf_snapshots(const IcFamily& family, const SimParams& params,
                            std::span<const std::vector<double>> points, std::size_t threads)
{
    SnapshotMatrix out(params.grid().h());
    for (std::size_t i = 0; i < points.size(); ++i) {
        try {
            out.add(hf_snapshot(params, family.make(points[i]), threads));
        } catch (const SolverError& e) {
            throw SolverError("high-fidelity sample " + std::to_string(i) + ": " + e.what(), e.residual());
        }
    }
    return out;
}

SurrogateBuild build_surrogate(const IcFamily& family, const SimParams& hf, const EulerParams& lf,
                               std::span<const std::vector<double>> training, std::size_t r, std::size_t threads)
{
    if (r < 1 || r > training.size())
        throw InputError("build_surrogate: need 1 <= r <= training size");
    SnapshotMatrix low = lf_snapshots(family, lf, training, threads);
    GreedyResult greedy = greedy_select(low, r);

    std::vector<std::vector<double>> points;
    SnapshotMatrix basis_low(low.weight());
    for (std::size_t idx : greedy.selected) {
        points.push_back(training[idx]);
        basis_low.add(low.column(idx));
    }
    SnapshotMatrix basis_high = hf_snapshots(family, hf, points, threads);
    return {BifiSurrogate(std::move(points), std::move(basis_low), std::move(basis_high)), std::move(greedy),
            std::move(low)};
}

void write_surrogate_archive(const std::filesystem::path& path, const BifiSurrogate& s,
                             const std::string& provenance)
{
    nlohmann::json j;
    j["format"] = "appic-bifi-surrogate";
    j["version"] = 1;
    j["provenance"] = provenance;
    j["points"] = s.points();
    j["low_weight"] = s.low().weight();
    j["high_weight"] = s.high().weight();
    j["low_columns"] = s.low().columns();
    j["high_columns"] = s.high().columns();
    std::vector<std::vector<double>> g(s.size(), std::vector<double>(s.size()));
    for (std::size_t a = 0; a < s.size(); ++a)
        for (std::size_t b = 0; b < s.size(); ++b)
            g[a][b] = s.gramian()(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    j["gramian"] = g;
    j["ridge"] = s.ridge();
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write surrogate archive " + path.string());
    out << j.dump(1) << '\n';
}

BifiSurrogate read_surrogate_archive(const std::filesystem::path& path, std::string* provenance)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot read surrogate archive " + path.string());
    const nlohmann::json j = nlohmann::json::parse(in);
    if (j.value("format", "") != "appic-bifi-surrogate")
        throw InputError("not a surrogate archive: " + path.string());
    if (provenance)
        *provenance = j.at("provenance").get<std::string>();
    SnapshotMatrix lo(j.at("low_weight").get<double>());
    SnapshotMatrix hi(j.at("high_weight").get<double>());
    for (auto& c : j.at("low_columns").get<std::vector<std::vector<double>>>())
        lo.add(std::move(c));
    for (auto& c : j.at("high_columns").get<std::vector<std::vector<double>>>())
        hi.add(std::move(c));
    return BifiSurrogate(j.at("points").get<std::vector<std::vector<double>>>(), std::move(lo), std::move(hi));
}

} // namespace appic
