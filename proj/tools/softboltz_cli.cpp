// softboltz: simulate, verify, sweep-m and kernel-report front end.
//
// Exit codes: 0 success, 1 verification failure (or I/O failure), 2 configuration
// error, 3 solver divergence or other numerical failure, 4 positivity violation.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "softboltz/config.hpp"
#include "softboltz/error.hpp"
#include "softboltz/initial.hpp"
#include "softboltz/io.hpp"
#include "softboltz/linop.hpp"
#include "softboltz/solver.hpp"
#include "softboltz/verify.hpp"

namespace sb = softboltz;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kConfig = 2, kDivergence = 3, kPositivity = 4 };

struct Options {
    std::string config;
    std::string out;
    int threads = 1;
    std::string mode;
    std::vector<double> m_list;
    std::vector<int> only;
    bool quiet = false;
};

sb::RunConfig load(const Options& o) {
    sb::RunConfig c = o.config.empty() ? sb::RunConfig{} : sb::load_config(o.config);
    if (!o.out.empty()) c.output_dir = o.out;
    if (!o.mode.empty()) {
        try {
            c.weight.mode = sb::parse_weight_mode(o.mode);
        } catch (const sb::InputError& e) {
            throw sb::ConfigError(e.what());
        }
    }
    if (o.threads < 1) throw sb::ConfigError("--threads must be positive");
    c.validate();
    return c;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", x);
    return buf;
}

std::string pad(std::size_t k) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04zu", k);
    return buf;
}

int simulate(const Options& o) {
    const sb::RunConfig c = load(o);
    const auto grid = c.make_grid();
    const auto domain = c.make_domain();
    const sb::WeightSpec spec = c.active_weight();
    std::ostringstream report;
    report << "# run configuration\n" << c.to_text() << "# result\n";
    const auto dir = c.output_dir;
    try {
        const sb::CollisionEngine engine(grid, c.sphere_order, c.kernel, o.threads);
        const auto f0 = sb::make_initial(grid, domain, c.initial, spec.beta, spec.p);
        const auto march = sb::time_march(engine, f0, c.windows, c.solver, spec);
        for (std::size_t k = 0; k < march.trajectory.size(); ++k)
            sb::write_file(dir / ("slice_" + pad(k) + ".csv"), sb::slice_csv(march.trajectory.slices[k]));
        sb::write_file(dir / "windows.csv", sb::windows_csv(march));
        for (std::size_t k = 0; k < march.windows.size(); ++k)
            sb::write_file(dir / ("trace_window_" + pad(k) + ".csv"), march.windows[k].trace.csv());
        std::string entropy = "window,entropy,non_increasing\n";
        for (std::size_t k = 0; k < march.entropy.size(); ++k) {
            const bool ok = k == 0 || march.entropy[k] <= march.entropy[k - 1];
            entropy += std::to_string(k) + ',' + fmt(march.entropy[k]) + ',' + (ok ? "1" : "0") + '\n';
        }
        sb::write_file(dir / "entropy.csv", entropy);
        report << "status: ok\n"
               << "windows: " << march.windows.size() << '\n'
               << "slices: " << march.trajectory.size() << '\n'
               << "max_entropy_increase: " << fmt(march.max_entropy_increase()) << '\n';
        for (std::size_t k = 0; k < march.windows.size(); ++k)
            report << "# window " << k << '\n' << march.windows[k].report.to_text();
        sb::write_file(dir / "report.txt", report.str());
        if (!o.quiet) std::cout << "simulate: " << march.windows.size() << " windows written to " << dir.string() << '\n';
        return kOk;
    } catch (const sb::DivergenceError& e) {
        report << "status: error\nerror_class: divergence\nmessage: " << e.what() << '\n';
        sb::write_file(dir / "report.txt", report.str());
        sb::write_file(dir / "trace_failed.csv", e.trace().csv());
        std::cerr << "simulate: divergence: " << e.what() << '\n';
        return kDivergence;
    } catch (const sb::PositivityError& e) {
        report << "status: error\nerror_class: positivity\nmessage: " << e.what() << '\n';
        sb::write_file(dir / "report.txt", report.str());
        std::cerr << "simulate: positivity violation: " << e.what() << '\n';
        return kPositivity;
    }
}

int verify(const Options& o) {
    const sb::RunConfig c = load(o);
    sb::VerifyOptions vo;
    vo.threads = o.threads;
    vo.only.insert(o.only.begin(), o.only.end());
    if (!o.quiet) vo.log = &std::cerr;
    const auto report = sb::run_verify(c, vo);
    const std::string text = report.to_text();
    std::cout << text;
    sb::write_file(c.output_dir / "verify_report.txt", text);
    if (!report.lemma41.empty()) sb::write_file(c.output_dir / "lemma41.csv", report.lemma41_csv());
    if (report.passed()) return kOk;
    std::cerr << "verify: failed criteria:";
    for (const auto& id : report.failures()) std::cerr << ' ' << id;
    std::cerr << '\n';
    return kVerifyFailed;
}

int sweep_m(const Options& o) {
    const sb::RunConfig c = load(o);
    const auto& ms = o.m_list.empty() ? c.verify.m_list : o.m_list;
    sb::ScalingFit fit;
    try {
        fit = sb::km_scaling(c.kernel, c.weight.p, ms);
    } catch (const sb::InputError& e) {
        throw sb::ConfigError(e.what());
    }
    std::string csv = "m,Km_value\n";
    for (std::size_t i = 0; i < fit.m.size(); ++i) csv += fmt(fit.m[i]) + ',' + fmt(fit.value[i]) + '\n';
    sb::write_file(c.output_dir / "km_sweep.csv", csv);
    const bool ok = fit.within(0.2);
    std::cout << "slope " << fmt(fit.slope) << " target " << fmt(fit.target) << ' '
              << (ok ? "scaling" : "non-scaling") << '\n';
    return ok ? kOk : kVerifyFailed;
}

int kernel_report(const Options& o) {
    const sb::RunConfig c = load(o);
    const sb::CollisionEngine engine(c.make_grid(), c.sphere_order, c.kernel, o.threads);
    const double beta = c.active_weight().beta;
    const auto k = sb::verify_k_bounds(engine, beta, 0.5 * c.extent);
    const auto l = sb::verify_l_bounds(engine, beta, c.kernel.m_cutoff, 0.5 * c.extent);
    const auto table = [](const sb::BoundReport& r) {
        std::string csv = "speed,integral,decay,prol1,prol4,gaussian\n";
        for (const auto& row : r.rows)
            csv += fmt(row.speed) + ',' + fmt(row.integral) + ',' + fmt(row.decay) + ',' + fmt(row.prol1) + ',' +
                   fmt(row.prol4) + ',' + fmt(row.gaussian) + '\n';
        return csv;
    };
    sb::write_file(c.output_dir / "k_bounds.csv", table(k));
    sb::write_file(c.output_dir / "l_bounds.csv", table(l));
    std::cout << "beta " << fmt(beta) << "\nk decay_spread " << fmt(k.decay_spread()) << " decay_max "
              << fmt(k.decay_max()) << "\nl decay_spread " << fmt(l.decay_spread()) << " decay_max "
              << fmt(l.decay_max()) << " prol1_max " << fmt(l.prol1_max()) << '\n';
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Soft-potential Boltzmann solver near a Maxwellian and its verification suite"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--config", o.config, "key = value configuration file (defaults when omitted)");
    app.add_option("--out", o.out, "output directory (overrides output.dir)");
    app.add_option("--threads", o.threads, "worker threads for the collision kernels");
    app.add_option("--mode", o.mode, "weight mode")->check(CLI::IsMember({"theorem", "exploratory"}));
    app.add_flag("--quiet", o.quiet, "no progress messages");

    auto* sim = app.add_subcommand("simulate", "march the solver over consecutive windows");
    auto* ver = app.add_subcommand("verify", "run the acceptance suite and print the report");
    ver->add_option("--only", o.only, "criteria to run (default: all)");
    auto* sweep = app.add_subcommand("sweep-m", "K^m scaling sweep and log-log slope");
    sweep->add_option("--m", o.m_list, "strictly decreasing m values (default: verify.m_list)");
    auto* kern = app.add_subcommand("kernel-report", "weighted kernel-majorant integrals");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*sim) return simulate(o);
        if (*ver) return verify(o);
        if (*sweep) return sweep_m(o);
        if (*kern) return kernel_report(o);
    } catch (const sb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const sb::InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kConfig;
    } catch (const sb::PositivityError& e) {
        std::cerr << "positivity violation: " << e.what() << '\n';
        return kPositivity;
    } catch (const sb::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kDivergence;
    } catch (const sb::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kVerifyFailed;
    }
    return kOk;
}
