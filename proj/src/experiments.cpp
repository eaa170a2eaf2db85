#include "appic/experiments.hpp"

#include "appic/bifidelity.hpp"
#include "appic/csv.hpp"
#include "appic/error.hpp"
#include "appic/initial_condition.hpp"
#include "appic/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace appic {

void ExperimentSpec::set(const std::string& key, const std::string& value)
{
    if (sim.set(key, value)) {
        if (key == "x_left" || key == "x_right")
            domain_set = true;
        return;
    }
    if (key == "ic")
        ic = trim(value);
    else if (key == "z")
        z = parse::real_list(key, value);
    else if (key == "output_times")
        output_times = parse::real_list(key, value);
    else if (key == "epsilon_list")
        epsilon_list = parse::real_list(key, value);
    else if (key == "nx_list")
        nx_list = parse::count_list(key, value);
    else if (key == "nx_ref")
        nx_ref = parse::count(key, value);
    else if (key == "lf_cells")
        lf.n_cells = parse::count(key, value);
    else if (key == "lf_dt_factor")
        lf.dt_factor = parse::real(key, value);
    else if (key == "lf_cfl_limit")
        lf.cfl_limit = parse::real(key, value);
    else if (key == "r_list")
        r_list = parse::count_list(key, value);
    else if (key == "n_train")
        n_train = parse::count(key, value);
    else if (key == "n_validation")
        n_validation = parse::count(key, value);
    else if (key == "sample_seed")
        sample_seed = parse::u64(key, value);
    else if (key == "kl_sigma")
        kl.sigma = parse::real(key, value);
    else if (key == "kl_length")
        kl.correlation_length = parse::real(key, value);
    else if (key == "kl_cut")
        kl.lambda_cut = parse::real(key, value);
    else if (key == "dump_particles")
        dump_particles = parse::boolean(key, value);
    else if (key == "phase_space_nv")
        phase_space_nv = parse::count(key, value);
    else if (key == "phase_space_vmax")
        phase_space_vmax = parse::real(key, value);
    else if (key == "threads")
        threads = parse::count(key, value);
    else if (key == "out_dir")
        out_dir = trim(value);
    else
        throw ConfigError("unknown config key '" + key + "'");
}

void ExperimentSpec::apply(const ConfigEntries& entries)
{
    for (const auto& [key, value] : entries)
        set(key, value);
}

void ExperimentSpec::finalize()
{
    const IcFamily family = make_ic_family(ic, kl);
    if (!domain_set) {
        sim.x_left = family.x_left;
        sim.x_right = family.x_right;
    }
    if (z.empty())
        z.assign(family.dimension, 0.0);
    if (z.size() != family.dimension)
        throw ConfigError("z has " + std::to_string(z.size()) + " entries but '" + ic + "' takes " +
                          std::to_string(family.dimension));
    sim.validate();
    if (threads < 1)
        throw ConfigError("threads must be >= 1");
    if (epsilon_list.empty() || nx_list.empty() || r_list.empty())
        throw ConfigError("epsilon_list, nx_list and r_list must be non-empty");
    for (double e : epsilon_list)
        if (!(e >= 0.0))
            throw ConfigError("epsilon_list entries must be >= 0");
    if (lf.n_cells < 3 || !(lf.dt_factor > 0.0) || !(lf.cfl_limit > 0.0))
        throw ConfigError("need lf_cells >= 3, lf_dt_factor > 0 and lf_cfl_limit > 0");
    if (n_train < 1 || n_validation < 1)
        throw ConfigError("n_train and n_validation must be >= 1");
    for (std::size_t r : r_list)
        if (r < 1 || r > n_train)
            throw ConfigError("every r_list entry must lie in [1, n_train]");
    if (phase_space_nv == 1 || !(phase_space_vmax > 0.0))
        throw ConfigError("phase_space_nv must be 0 or >= 2 and phase_space_vmax > 0");
}

std::string ExperimentSpec::fingerprint() const
{
    std::ostringstream s;
    s.precision(17);
    s << params_fingerprint(sim) << '|' << ic << '|';
    for (double v : z)
        s << v << ',';
    s << '|';
    for (double v : epsilon_list)
        s << v << ',';
    s << '|';
    for (std::size_t v : nx_list)
        s << v << ',';
    s << '|' << nx_ref << '|' << lf.n_cells << ',' << lf.dt_factor << ',' << lf.cfl_limit << '|';
    for (std::size_t v : r_list)
        s << v << ',';
    s << '|' << n_train << ',' << n_validation << ',' << sample_seed << '|' << kl.sigma << ','
      << kl.correlation_length << ',' << kl.lambda_cut;
    return fnv1a_hex(s.str());
}

double ConvergenceResult::slope(double epsilon, const std::string& quantity) const
{
    for (const auto& s : slopes)
        if (s.epsilon == epsilon && s.quantity == quantity)
            return s.slope;
    throw InputError("no slope recorded for " + quantity);
}

double BifiResult::bifi(double epsilon, std::size_t r, const std::string& quantity) const
{
    for (const auto& row : rows)
        if (row.epsilon == epsilon && row.r == r && row.quantity == quantity)
            return row.bifi_error;
    throw InputError("no bi-fidelity error recorded for r = " + std::to_string(r));
}

double BifiResult::lofi(double epsilon, const std::string& quantity) const
{
    for (const auto& row : rows)
        if (row.epsilon == epsilon && row.quantity == quantity)
            return row.lofi_error;
    throw InputError("no low-fidelity error recorded");
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw InputError("loglog_slope: need at least two matching points");
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw InputError("loglog_slope: values must be positive");
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

namespace {

std::filesystem::path prepare(const ExperimentSpec& spec, const std::string& file)
{
    std::filesystem::create_directories(spec.out_dir);
    return spec.out_dir / file;
}

std::string tag(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", value);
    return buf;
}

RunOptions options_of(const ExperimentSpec& spec)
{
    RunOptions o;
    o.threads = spec.threads;
    return o;
}

void summarize(const EnsembleOutput& ens, std::ostream& log, const std::string& label)
{
    for (std::size_t i = 0; i < ens.runs.size(); ++i) {
        const RunOutput& r = ens.runs[i];
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s run %zu: steps %zu, mean newton iterations %.3f, wall %.3f s\n",
                      label.c_str(), i, r.steps, r.mean_newton_iterations, r.wall_seconds);
        log << buf;
    }
}

SimParams with_epsilon(const SimParams& base, double epsilon)
{
    SimParams p = base;
    p.epsilon = epsilon;
    return p;
}

} // namespace

void cmd_simulate(const ExperimentSpec& spec, std::ostream& log)
{
    const InitialCondition ic = make_ic_family(spec.ic, spec.kl).make(spec.z);
    RunOptions opts = options_of(spec);
    opts.output_times = spec.output_times;
    opts.keep_particles = spec.dump_particles || spec.phase_space_nv > 0;
    const EnsembleOutput ens = run_ensemble(spec.sim, ic, opts);
    const Grid grid = spec.sim.grid();

    CsvWriter fields(prepare(spec, "fields.csv"), {"t", "x", "n", "u", "phi", "E"});
    for (const FieldFrame& f : ens.mean)
        for (std::size_t j = 0; j < grid.size(); ++j) {
            fields.cell(f.t).cell(grid.center(j)).cell(f.n[j]).cell(f.u[j]).cell(f.phi[j]).cell(f.E[j]);
            fields.end_row();
        }

    CsvWriter qn(prepare(spec, "quasineutrality.csv"), {"t", "newton_iterations", "quasineutrality_l2"});
    for (const StepDiagnostic& d : ens.mean_diagnostics) {
        qn.cell(d.t).cell(d.newton_iterations).cell(d.quasineutrality_l2);
        qn.end_row();
    }

    const ParticleEnsemble& particles = ens.runs.front().final_particles;
    if (spec.dump_particles) {
        std::ofstream dump(prepare(spec, "particles_run0.csv"), std::ios::binary);
        write_particle_dump(dump, particles);
    }
    if (spec.phase_space_nv > 0) {
        std::vector<double> vs(spec.phase_space_nv);
        for (std::size_t l = 0; l < vs.size(); ++l)
            vs[l] = -spec.phase_space_vmax +
                    2.0 * spec.phase_space_vmax * static_cast<double>(l) / static_cast<double>(vs.size() - 1);
        const std::vector<double> f = reconstruct_phase_space(particles, grid, vs, spec.sim.kernel_width);
        CsvWriter ps(prepare(spec, "phase_space.csv"), {"x", "v", "f"});
        for (std::size_t j = 0; j < grid.size(); ++j)
            for (std::size_t l = 0; l < vs.size(); ++l) {
                ps.cell(grid.center(j)).cell(vs[l]).cell(f[j * vs.size() + l]);
                ps.end_row();
            }
    }
    summarize(ens, log, spec.ic);
}

ConvergenceResult cmd_converge(const ExperimentSpec& spec, std::ostream& log)
{
    for (std::size_t nx : spec.nx_list)
        if (nx >= spec.nx_ref || spec.nx_ref % nx != 0)
            throw ConfigError("nx_ref must exceed and be a multiple of every nx_list entry");

    const InitialCondition ic = make_ic_family(spec.ic, spec.kl).make(spec.z);
    const char* quantities[] = {"n", "u", "phi"};
    ConvergenceResult result;
    for (double eps : spec.epsilon_list) {
        SimParams p = with_epsilon(spec.sim, eps);
        p.n_cells = spec.nx_ref;
        p.validate();
        const EnsembleOutput ref = run_ensemble(p, ic, options_of(spec));
        summarize(ref, log, "reference eps=" + tag(eps));
        const FieldFrame& rf = ref.final_frame();

        std::vector<double> hs;
        std::vector<std::vector<double>> errs(3);
        for (std::size_t nx : spec.nx_list) {
            p.n_cells = nx;
            p.validate();
            const EnsembleOutput test = run_ensemble(p, ic, options_of(spec));
            const FieldFrame& tf = test.final_frame();
            const double h = p.grid().h();
            hs.push_back(h);
            const std::vector<double>* fine[] = {&rf.n, &rf.u, &rf.phi};
            const std::vector<double>* coarse[] = {&tf.n, &tf.u, &tf.phi};
            for (int q = 0; q < 3; ++q) {
                const double e = l2_error(*coarse[q], block_average(*fine[q], nx), h);
                errs[q].push_back(e);
                result.rows.push_back({eps, nx, quantities[q], e});
            }
        }
        for (int q = 0; q < 3; ++q) {
            const double s = loglog_slope(hs, errs[q]);
            result.slopes.push_back({eps, quantities[q], s});
            log << "eps=" << tag(eps) << " slope(" << quantities[q] << ") = " << s << '\n';
        }
    }

    CsvWriter table(prepare(spec, "convergence.csv"), {"epsilon", "Nx", "quantity", "l2_error"});
    for (const auto& r : result.rows) {
        table.cell(r.epsilon).cell(r.nx).cell(r.quantity).cell(r.error);
        table.end_row();
    }
    CsvWriter slopes(prepare(spec, "convergence_slopes.csv"), {"epsilon", "quantity", "slope"});
    for (const auto& s : result.slopes) {
        slopes.cell(s.epsilon).cell(s.quantity).cell(s.slope);
        slopes.end_row();
    }
    return result;
}

std::vector<LimitRow> cmd_limit_compare(const ExperimentSpec& spec, std::ostream& log)
{
    const InitialCondition ic = make_ic_family(spec.ic, spec.kl).make(spec.z);
    SimParams qp = spec.sim;
    qp.poisson_mode = PoissonMode::quasineutral;
    RunOptions opts = options_of(spec);
    const EnsembleOutput limit = run_ensemble(qp, ic, opts);
    summarize(limit, log, "quasineutral");
    const FieldFrame& lf = limit.final_frame();

    std::vector<LimitRow> rows;
    CsvWriter history(prepare(spec, "quasineutrality_history.csv"), {"epsilon", "t", "quasineutrality_l2"});
    for (double eps : spec.epsilon_list) {
        SimParams p = with_epsilon(spec.sim, eps);
        if (p.poisson_mode == PoissonMode::quasineutral)
            p.poisson_mode = PoissonMode::newton;
        const EnsembleOutput rf = run_ensemble(p, ic, opts);
        summarize(rf, log, "eps=" + tag(eps));
        const FieldFrame& f = rf.final_frame();

        const auto& diag = rf.mean_diagnostics;
        double saturated = 0.0;
        const std::size_t start = diag.size() / 2;
        for (std::size_t s = start; s < diag.size(); ++s)
            saturated += diag[s].quasineutrality_l2;
        if (diag.size() > start)
            saturated /= static_cast<double>(diag.size() - start);
        for (const auto& d : diag) {
            history.cell(eps).cell(d.t).cell(d.quasineutrality_l2);
            history.end_row();
        }
        rows.push_back({eps, relative_error(f.n, lf.n), relative_error(f.u, lf.u), relative_error(f.phi, lf.phi),
                        saturated});
    }

    CsvWriter table(prepare(spec, "limit_compare.csv"), {"epsilon", "quantity", "value"});
    for (const auto& r : rows) {
        table.cell(r.epsilon).cell("n").cell(r.err_n);
        table.end_row();
        table.cell(r.epsilon).cell("u").cell(r.err_u);
        table.end_row();
        table.cell(r.epsilon).cell("phi").cell(r.err_phi);
        table.end_row();
    }
    CsvWriter sat(prepare(spec, "quasineutrality_saturation.csv"), {"epsilon", "saturated_l2"});
    for (const auto& r : rows) {
        sat.cell(r.epsilon).cell(r.saturated_qn);
        sat.end_row();
    }
    return rows;
}

std::vector<SchemeRow> cmd_scheme_compare(const ExperimentSpec& spec, std::ostream& log)
{
    const InitialCondition ic = make_ic_family(spec.ic, spec.kl).make(spec.z);
    SimParams np = spec.sim;
    np.poisson_mode = PoissonMode::newton;
    SimParams pp = spec.sim;
    pp.poisson_mode = PoissonMode::penalty;
    const EnsembleOutput a = run_ensemble(np, ic, options_of(spec));
    summarize(a, log, "newton");
    const EnsembleOutput b = run_ensemble(pp, ic, options_of(spec));
    summarize(b, log, "penalty");
    const FieldFrame& fa = a.final_frame();
    const FieldFrame& fb = b.final_frame();
    const double h = spec.sim.grid().h();

    std::vector<SchemeRow> rows{
        {"n", l2_error(fb.n, fa.n, h), relative_error(fb.n, fa.n)},
        {"u", l2_error(fb.u, fa.u, h), relative_error(fb.u, fa.u)},
        {"phi", l2_error(fb.phi, fa.phi, h), relative_error(fb.phi, fa.phi)},
    };
    CsvWriter table(prepare(spec, "scheme_compare.csv"), {"quantity", "l2_difference", "relative_difference"});
    for (const auto& r : rows) {
        table.cell(r.quantity).cell(r.l2_difference).cell(r.relative_difference);
        table.end_row();
    }
    return rows;
}

namespace {

void write_statistics(const std::filesystem::path& path, const Grid& grid, const SnapshotMatrix& hf,
                      const SnapshotMatrix& bf, std::size_t offset)
{
    CsvWriter out(path, {"x", "mean_hf", "std_hf", "mean_bf", "std_bf"});
    const auto k = static_cast<double>(hf.cols());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double stats[4] = {0.0, 0.0, 0.0, 0.0};
        for (int which = 0; which < 2; ++which) {
            const SnapshotMatrix& m = which == 0 ? hf : bf;
            double mean = 0.0;
            for (std::size_t c = 0; c < m.cols(); ++c)
                mean += m.column(c)[offset + j];
            mean /= k;
            double var = 0.0;
            for (std::size_t c = 0; c < m.cols(); ++c) {
                const double d = m.column(c)[offset + j] - mean;
                var += d * d;
            }
            stats[2 * which] = mean;
            stats[2 * which + 1] = m.cols() > 1 ? std::sqrt(var / (k - 1.0)) : 0.0;
        }
        out.cell(grid.center(j)).cell(stats[0]).cell(stats[1]).cell(stats[2]).cell(stats[3]);
        out.end_row();
    }
}

double relative_column_error(const SnapshotMatrix& m, std::span<const double> approx, std::size_t col)
{
    const auto& ref = m.column(col);
    std::vector<double> diff(ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i)
        diff[i] = approx[i] - ref[i];
    return std::sqrt(m.inner(diff, diff) / m.inner(ref, ref));
}

} // namespace

BifiResult cmd_bifidelity(const ExperimentSpec& spec, std::ostream& log)
{
    const IcFamily family = make_ic_family(spec.ic, spec.kl);
    const Grid hf_grid = spec.sim.grid();
    EulerParams lf = spec.lf;
    lf.t_final = spec.sim.t_final;
    const double lf_h = (family.x_right - family.x_left) / static_cast<double>(lf.n_cells);
    std::vector<double> lf_nodes(lf.n_cells);
    for (std::size_t j = 0; j < lf.n_cells; ++j)
        lf_nodes[j] = family.x_left + static_cast<double>(j) * lf_h;
    const std::vector<std::vector<double>> checks{hf_grid.centers(), lf_nodes};

    const auto training = sample_parameters(family, spec.n_train, run_seed(spec.sample_seed, 0, 1), checks);
    const auto validation = sample_parameters(family, spec.n_validation, run_seed(spec.sample_seed, 1, 1), checks);

    const SnapshotMatrix low_train = lf_snapshots(family, lf, training, spec.threads);
    const SnapshotMatrix low_val = lf_snapshots(family, lf, validation, spec.threads);
    const std::size_t r_max = *std::max_element(spec.r_list.begin(), spec.r_list.end());
    const GreedyResult greedy = greedy_select(low_train, r_max);
    log << "greedy selected " << greedy.selected.size() << " of " << training.size() << " training points\n";
    if (greedy.selected.size() < r_max)
        log << "note: low-fidelity snapshots span only " << greedy.selected.size()
            << " directions; larger r values are skipped\n";

    CsvWriter gcsv(prepare(spec, "greedy.csv"), {"stage", "sample_index", "residual_norm"});
    for (std::size_t s = 0; s < greedy.selected.size(); ++s) {
        gcsv.cell(s).cell(greedy.selected[s]).cell(greedy.residual_norms[s]);
        gcsv.end_row();
    }

    std::vector<std::vector<double>> points;
    SnapshotMatrix basis_low(low_train.weight());
    for (std::size_t idx : greedy.selected) {
        points.push_back(training[idx]);
        basis_low.add(low_train.column(idx));
    }

    BifiResult result;
    for (double eps : spec.epsilon_list) {
        const SimParams hp = with_epsilon(spec.sim, eps);
        const BifiSurrogate full(points, basis_low, hf_snapshots(family, hp, points, spec.threads));
        const SnapshotMatrix high_val = hf_snapshots(family, hp, validation, spec.threads);

        SnapshotMatrix lf_on_hf(high_val.weight());
        for (std::size_t k = 0; k < validation.size(); ++k)
            lf_on_hf.add(lf_on_hf_grid(low_val.column(k), lf, family.make(validation[k]), hf_grid));
        const QuantityErrors lofi = mean_l2_distance(lf_on_hf, high_val, hf_grid.h());

        for (std::size_t r : spec.r_list) {
            if (r > full.size())
                continue;
            const QuantityErrors e = validation_error(full.truncated(r), low_val, high_val);
            result.rows.push_back({r, "n", eps, e.n, lofi.n});
            result.rows.push_back({r, "u", eps, e.u, lofi.u});
            log << "eps=" << tag(eps) << " r=" << r << " error(n)=" << e.n << " error(u)=" << e.u << '\n';
        }

        double worst = 0.0;
        for (std::size_t k = 0; k < full.size(); ++k) {
            const auto rec = bifi_reconstruct(full, lf_coefficients(full, full.low().column(k)));
            worst = std::max(worst, relative_column_error(full.high(), rec, k));
        }
        result.interpolation_error.push_back(worst);
        result.condition_number.push_back(full.condition_number());

        SnapshotMatrix bf_val(high_val.weight());
        for (std::size_t k = 0; k < validation.size(); ++k)
            bf_val.add(bifi_reconstruct(full, lf_coefficients(full, low_val.column(k))));
        write_statistics(prepare(spec, "stats_n_eps" + tag(eps) + ".csv"), hf_grid, high_val, bf_val, 0);
        write_statistics(prepare(spec, "stats_u_eps" + tag(eps) + ".csv"), hf_grid, high_val, bf_val,
                         hf_grid.size());
        write_surrogate_archive(prepare(spec, "surrogate_eps" + tag(eps) + ".json"), full, spec.fingerprint());
    }

    CsvWriter table(prepare(spec, "bifidelity_errors.csv"), {"r", "quantity", "epsilon", "bifi_error", "lofi_error"});
    for (const auto& row : result.rows) {
        table.cell(row.r).cell(row.quantity).cell(row.epsilon).cell(row.bifi_error).cell(row.lofi_error);
        table.end_row();
    }
    return result;
}

void cmd_kl_info(const ExperimentSpec& spec, std::ostream& log)
{
    const KlField field = kl_build(spec.kl, kl_test3_mean);
    CsvWriter out(prepare(spec, "kl_modes.csv"), {"index", "kind", "frequency", "lambda"});
    double total = 0.0;
    for (std::size_t j = 0; j < field.dimension(); ++j) {
        const KlMode& m = field.modes()[j];
        const char* kind = m.kind == KlMode::Kind::constant ? "constant"
                           : m.kind == KlMode::Kind::cosine ? "cosine"
                                                            : "sine";
        out.cell(j).cell(kind).cell(m.frequency).cell(m.lambda);
        out.end_row();
        total += m.lambda;
    }
    log << "truncation dimension d = " << field.dimension() << ", retained variance sum = " << total << '\n';
}

} // namespace appic
