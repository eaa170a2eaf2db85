// Acceptance driver: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Every tolerance and scale below is fixed; nothing is read from the environment.

#include "appic/config.hpp"
#include "appic/error.hpp"
#include "appic/euler.hpp"
#include "appic/experiments.hpp"
#include "appic/initial_condition.hpp"
#include "appic/kl.hpp"
#include "appic/simulation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace appic;
namespace fs = std::filesystem;

namespace {

struct Verdict
{
    bool pass = false;
    std::string detail;
};

fs::path g_root;

std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

ExperimentSpec spec_from(const std::string& text, const std::string& dir)
{
    ExperimentSpec s;
    s.apply(parse_config_text(text));
    s.out_dir = g_root / dir;
    s.finalize();
    return s;
}

// ---------------------------------------------------------------------------

Verdict equilibrium()
{
    const std::size_t cells = 64;
    const Grid g(0.0, 1.0, cells);
    ParticleEnsemble e;
    for (std::size_t j = 0; j < cells; ++j) {
        e.x.push_back(g.center(j));
        e.v.push_back(0.0);
        e.w.push_back(g.h());
    }
    SimParams p;
    p.n_cells = cells;
    p.n_particles_total = cells;
    p.epsilon = 0.01;
    const double dt = derive_time_step(p.cfl, g.h(), 0.0);
    SimState s = make_state(e, g);
    double worst = 0.0;
    for (int m = 0; m < 100; ++m) {
        advance(s, p, g, dt);
        for (std::size_t j = 0; j < cells; ++j) {
            worst = std::max({worst, std::abs(s.phi[j]), std::abs(s.E[j]), std::abs(s.moments.n[j] - 1.0),
                              std::abs(s.moments.J[j]), std::abs(s.moments.S[j])});
        }
    }
    return {worst <= 1e-12, "max deviation over 100 steps " + fmt("%.3g", worst)};
}

Verdict convergence()
{
    const ExperimentSpec s = spec_from("n_particles_total = 4e5\nn_ensemble = 50\nnx_ref = 200\nnx_list = 25,50,100\n"
                                       "t_final = 0.2\nepsilon_list = 1,0.01,1e-4\n",
                                       "c2");
    std::ostringstream log;
    const ConvergenceResult r = cmd_converge(s, log);
    bool ok = true;
    std::string detail;
    for (double eps : s.epsilon_list)
        for (const char* q : {"n", "phi"}) {
            const double k = r.slope(eps, q);
            ok = ok && k >= 0.7 && k <= 1.3;
            detail += "eps=" + fmt("%g", eps) + " " + q + ":" + fmt("%.2f", k) + " ";
        }
    return {ok, "slopes " + detail};
}

std::vector<LimitRow> limit_rows(const std::string& eps_list, const std::string& dir)
{
    const ExperimentSpec s = spec_from("n_cells = 100\nn_particles_total = 2e5\nn_ensemble = 20\nt_final = 2\n"
                                       "epsilon_list = " +
                                           eps_list + "\n",
                                       dir);
    std::ostringstream log;
    return cmd_limit_compare(s, log);
}

Verdict limit_errors()
{
    const auto rows = limit_rows("0.1,0.01,1e-4", "c3");
    bool monotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        monotone = monotone && rows[i].err_n < rows[i - 1].err_n && rows[i].err_u < rows[i - 1].err_u &&
                   rows[i].err_phi < rows[i - 1].err_phi;
    std::string detail = "E_r(n) =";
    for (const auto& r : rows)
        detail += " " + fmt("%.4g", r.err_n);
    detail += monotone ? ", monotone" : ", NOT monotone";
    return {monotone && rows.back().err_n < 0.02, detail};
}

Verdict quasineutrality_decay()
{
    const auto rows = limit_rows("1,1e-4", "c4");
    const double ratio = rows[0].saturated_qn / rows[1].saturated_qn;
    return {ratio >= 5.0, "saturated ||n - e^phi||: eps=1 " + fmt("%.4g", rows[0].saturated_qn) + ", eps=1e-4 " +
                              fmt("%.4g", rows[1].saturated_qn) + ", ratio " + fmt("%.3g", ratio)};
}

Verdict scheme_equivalence()
{
    const ExperimentSpec s =
        spec_from("n_cells = 100\nn_particles_total = 2e5\nn_ensemble = 20\nt_final = 2\nepsilon = 0.01\n", "c5");
    std::ostringstream log;
    const auto rows = cmd_scheme_compare(s, log);
    const double rel = rows.at(0).relative_difference;
    return {rel < 1e-2, "relative l2 difference of n " + fmt("%.4g", rel)};
}

Verdict bifidelity_decay()
{
    const ExperimentSpec s = spec_from("ic = uq-test1\nt_final = 0.5\nn_cells = 100\nn_particles_total = 2e5\n"
                                       "n_ensemble = 20\nn_train = 100\nn_validation = 20\nr_list = 2,4,6,8,10\n"
                                       "epsilon_list = 1,0.1,0.01\nlf_cells = 1000\n",
                                       "c6");
    std::ostringstream log;
    const BifiResult r = cmd_bifidelity(s, log);
    bool ok = true;
    std::string detail;
    for (double eps : s.epsilon_list) {
        const double e2 = r.bifi(eps, 2, "n"), e10 = r.bifi(eps, 10, "n"), lo = r.lofi(eps, "n");
        ok = ok && e10 < 0.5 * e2 && e10 < lo;
        detail += "eps=" + fmt("%g", eps) + " r2:" + fmt("%.3g", e2) + " r10:" + fmt("%.3g", e10) +
                  " lf:" + fmt("%.3g", lo) + "; ";
    }
    return {ok, detail};
}

Verdict exact_interpolation()
{
    const ExperimentSpec s = spec_from("ic = uq-test1\nt_final = 0.5\nn_cells = 50\nn_particles_total = 5000\n"
                                       "n_ensemble = 2\nn_train = 40\nn_validation = 4\nr_list = 2,5\n"
                                       "epsilon_list = 1,0.01\nlf_cells = 400\n",
                                       "c7");
    std::ostringstream log;
    const BifiResult r = cmd_bifidelity(s, log);
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < r.interpolation_error.size(); ++i) {
        const bool applies = r.condition_number[i] <= 1e8;
        ok = ok && (!applies || r.interpolation_error[i] <= 1e-6);
        detail += "cond " + fmt("%.3g", r.condition_number[i]) + " err " + fmt("%.3g", r.interpolation_error[i]) +
                  (applies ? "; " : " (exempt); ");
    }
    return {ok, detail};
}

Verdict euler_conservation()
{
    const IcFamily fam = make_ic_family("uq-test1");
    const InitialCondition ic = fam.make(std::vector<double>(fam.dimension, 0.0));
    EulerParams p;
    p.n_cells = 1000;
    const double h = (ic.x_right - ic.x_left) / static_cast<double>(p.n_cells);
    const double tau = p.dt_factor * h;
    p.t_final = 1e4 * tau;
    const EulerOutput out = run_euler(p, ic);

    const EulerState init = euler_initial_state(ic, p.n_cells);
    double momentum_scale = 0.0;
    for (double m : init.m)
        momentum_scale += h * std::abs(m);
    const double dm = std::abs(out.final_mass - out.initial_mass) / out.initial_mass;
    const double dp = std::abs(out.final_momentum - out.initial_momentum) / momentum_scale;
    const bool steps_ok = out.steps >= 10000 && out.steps <= 10001;
    return {steps_ok && dm <= 1e-12 && dp <= 1e-12, std::to_string(out.steps) + " steps, mass drift " +
                                                        fmt("%.3g", dm) + ", momentum drift " + fmt("%.3g", dp)};
}

Verdict kl_fidelity()
{
    const KlSettings s{};
    const KlField f = kl_build(s, kl_test3_mean);
    const std::size_t d = f.dimension();

    // Trapezoid on a uniform periodic grid is exact for trigonometric products of this degree.
    const int nodes = 4096;
    const double dx = s.domain_length / nodes;
    std::vector<std::vector<double>> table(d, std::vector<double>(nodes));
    for (std::size_t j = 0; j < d; ++j)
        for (int i = 0; i < nodes; ++i)
            table[j][i] = f.eigenfunction(j, s.x_left + i * dx);
    double ortho = 0.0;
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a; b < d; ++b) {
            double sum = 0.0;
            for (int i = 0; i < nodes; ++i)
                sum += table[a][i] * table[b][i];
            ortho = std::max(ortho, std::abs(sum * dx - (a == b ? 1.0 : 0.0)));
        }

    std::mt19937_64 rng(314159);
    std::normal_distribution<double> normal;
    const std::pair<double, double> pairs[] = {{0.3, 0.3}, {0.3, 0.7}, {1.0, 1.5}, {2.0, 3.0}, {4.0, 6.0}};
    const int samples = 10000;
    std::vector<double> sum(5, 0.0), sum2(5, 0.0);
    std::vector<double> z(d);
    for (int k = 0; k < samples; ++k) {
        for (double& v : z)
            v = normal(rng);
        for (int p = 0; p < 5; ++p) {
            const double prod = f.fluctuation(z, pairs[p].first) * f.fluctuation(z, pairs[p].second);
            sum[p] += prod;
            sum2[p] += prod * prod;
        }
    }
    double worst = 0.0;
    for (int p = 0; p < 5; ++p) {
        const double mean = sum[p] / samples;
        const double se = std::sqrt((sum2[p] / samples - mean * mean) / (samples - 1));
        const double target =
            squared_exponential_covariance(s.sigma, s.correlation_length, pairs[p].first - pairs[p].second);
        worst = std::max(worst, std::abs(mean - target) / se);
    }
    return {ortho <= 1e-8 && worst <= 3.0, "d = " + std::to_string(d) + ", orthonormality defect " +
                                               fmt("%.3g", ortho) + ", worst covariance deviation " +
                                               fmt("%.2f", worst) + " standard errors"};
}

std::map<std::string, std::string> csv_contents(const fs::path& dir)
{
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".csv")
            continue;
        std::ifstream in(entry.path(), std::ios::binary);
        files[fs::relative(entry.path(), dir).string()] =
            std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    return files;
}

Verdict determinism()
{
    const std::string base = "n_cells = 20\nn_particles_total = 4000\nt_final = 0.1\nn_ensemble = 4\n"
                             "epsilon_list = 1,0.01\nnx_list = 10,20\nnx_ref = 40\nphase_space_nv = 8\n";
    const std::string bifi = "ic = uq-test1\nn_cells = 20\nn_particles_total = 2000\nt_final = 0.1\n"
                             "n_ensemble = 2\nn_train = 10\nn_validation = 3\nr_list = 2,4\nepsilon_list = 1\n"
                             "lf_cells = 100\n";
    auto run_all = [&](const std::string& tag, std::size_t threads) {
        const std::string t = "threads = " + std::to_string(threads) + "\n";
        std::ostringstream log;
        const fs::path dir = g_root / "c10" / tag;
        fs::remove_all(dir);
        cmd_simulate(spec_from(base + t, "c10/" + tag + "/simulate"), log);
        cmd_converge(spec_from(base + t, "c10/" + tag + "/converge"), log);
        cmd_limit_compare(spec_from(base + t, "c10/" + tag + "/limit"), log);
        cmd_scheme_compare(spec_from(base + t, "c10/" + tag + "/scheme"), log);
        cmd_bifidelity(spec_from(bifi + t, "c10/" + tag + "/bifi"), log);
        cmd_kl_info(spec_from(t, "c10/" + tag + "/kl"), log);
        return csv_contents(dir);
    };
    const auto first = run_all("a", 1);
    const auto second = run_all("b", 1);
    const auto threaded = run_all("c", 4);
    std::size_t mismatches = 0;
    for (const auto& other : {second, threaded}) {
        if (other.size() != first.size())
            ++mismatches;
        for (const auto& [name, bytes] : first) {
            auto it = other.find(name);
            if (it == other.end() || it->second != bytes)
                ++mismatches;
        }
    }
    return {mismatches == 0 && first.size() >= 10,
            std::to_string(first.size()) + " CSV files compared across 3 runs, " + std::to_string(mismatches) +
                " mismatches"};
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"equilibrium fixed point", equilibrium},
        {"spatial convergence", convergence},
        {"quasineutral-limit errors", limit_errors},
        {"n vs e^phi decay", quasineutrality_decay},
        {"newton/penalty equivalence", scheme_equivalence},
        {"bi-fidelity error decay", bifidelity_decay},
        {"exact interpolation at selected points", exact_interpolation},
        {"Lax-Friedrichs conservation", euler_conservation},
        {"KL fidelity", kl_fidelity},
        {"determinism", determinism},
    };

    CLI::App app{"appic acceptance criteria"};
    std::vector<int> selected;
    std::string root = (fs::temp_directory_path() / "appic_acceptance").string();
    app.add_option("--criterion,-c", selected, "criterion number(s); default all")
        ->check(CLI::Range(1, static_cast<int>(criteria.size())));
    app.add_option("--work-dir", root, "scratch directory for CSV output");
    CLI11_PARSE(app, argc, argv);
    g_root = root;
    if (selected.empty())
        for (int i = 1; i <= static_cast<int>(criteria.size()); ++i)
            selected.push_back(i);

    int failures = 0;
    for (int c : selected) {
        const auto& [name, check] = criteria[c - 1];
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("C%d %s: %s -- %s [%.1f s]\n", c, v.pass ? "PASS" : "FAIL", name, v.detail.c_str(), secs);
        std::fflush(stdout);
        failures += v.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
