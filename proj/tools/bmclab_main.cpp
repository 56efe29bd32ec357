#include "bmclab/criterion.hpp"
#include "bmclab/errors.hpp"
#include "bmclab/graph.hpp"
#include "bmclab/json_io.hpp"
#include "bmclab/simulate.hpp"
#include "bmclab/spectral.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace bmclab;

unsigned worker_count() {
    if (const char* env = std::getenv("BMCLAB_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
        std::cerr << "ignoring invalid BMCLAB_THREADS value '" << env << "'\n";
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

void emit(const std::string& text, const std::string& out_path) {
    std::cout << text;
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw ConfigError("cannot open output file " + out_path);
        out << text;
    }
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct ClassifyOptions {
    std::string spec_path;
    std::string out_path;
    std::string format = "json";
    double tol = 1e-10;
    double boundary_tol = kDefaultBoundaryTol;
};

int cmd_classify(const ClassifyOptions& opt) {
    auto spec = load_spec_file(opt.spec_path);
    auto report = criterion_value(spec, opt.tol, opt.boundary_tol);
    if (opt.format == "csv") {
        std::ostringstream os;
        os << "c,verdict,boundary_flag,theta_star,active_laws\n";
        os << fmt_double(report.c) << ',' << to_string(report.verdict) << ','
           << (report.boundary_flag ? 1 : 0) << ',';
        for (std::size_t i = 0; i < report.theta_star.size(); ++i)
            os << (i ? ";" : "") << fmt_double(report.theta_star[i]);
        os << ',';
        for (std::size_t i = 0; i < report.active_laws.size(); ++i)
            os << (i ? ";" : "") << report.active_laws[i];
        os << '\n';
        emit(os.str(), opt.out_path);
    } else {
        emit(report_to_json(report).dump(2) + "\n", opt.out_path);
    }
    return 0;
}

struct SpectralOptions {
    std::string spec_path;
    std::string out_path;
    std::vector<std::int64_t> schedule;
    std::uint64_t seed = 0;
    bool seed_given = false;
    double tol = kDefaultSpectralTol;
    std::uint64_t max_iter = kDefaultSpectralMaxIter;
};

int cmd_spectral(const SpectralOptions& opt) {
    auto spec = std::make_shared<EnvironmentSpec>(load_spec_file(opt.spec_path));
    if (opt.schedule.empty()) throw ConfigError("--schedule must not be empty");
    if (spec->palette.size() > 1 && !opt.seed_given)
        throw ConfigError("multi-law palettes need --seed to sample a realization");

    const std::int64_t max_radius =
        *std::max_element(opt.schedule.begin(), opt.schedule.end());
    const auto window = Box::centered(spec->generator.dimension, max_radius);
    auto env = spec->palette.size() == 1
                   ? homogeneous_realization(spec, window)
                   : sample_environment(spec, window, opt.seed);

    auto estimates = spectral_radius_sup(env, opt.schedule, opt.tol, opt.max_iter);
    std::ostringstream os;
    os << "L,estimate,residual,iterations,converged\n";
    for (const auto& est : estimates) {
        os << est.window_radius << ',' << fmt_double(est.value) << ','
           << fmt_double(est.residual) << ',' << est.iterations << ','
           << (est.converged ? 1 : 0) << '\n';
    }
    emit(os.str(), opt.out_path);
    return 0;
}

struct SimulateOptions {
    std::string spec_path;
    std::string out_path;
    std::string format = "json";
    std::uint64_t replicas = 1000;
    std::uint64_t horizon = 1000;
    std::uint64_t cap = 100000;
    std::uint64_t seed = 0;
    std::int64_t box_radius = 500;
};

int cmd_simulate(const SimulateOptions& opt) {
    auto spec = std::make_shared<EnvironmentSpec>(load_spec_file(opt.spec_path));
    const auto window = Box::centered(spec->generator.dimension, opt.box_radius);
    auto env = spec->palette.size() == 1
                   ? homogeneous_realization(spec, window)
                   : sample_environment(spec, window, opt.seed);
    const Site origin(static_cast<std::size_t>(spec->generator.dimension), 0);
    const unsigned threads = worker_count();

    auto gw = estimate_gw_mean(env, origin, opt.replicas, opt.horizon, opt.cap,
                               opt.seed, threads);
    auto probe = recurrence_probe(env, origin, opt.replicas, opt.horizon, opt.cap,
                                  opt.seed, threads);

    if (!opt.out_path.empty()) {
        // per-replica trace; flags are the union of the frozen and probe runs
        std::ofstream out(opt.out_path, std::ios::binary);
        if (!out) throw ConfigError("cannot open output file " + opt.out_path);
        out << "replica,nu,returns,capped,exhausted\n";
        for (std::uint64_t r = 0; r < opt.replicas; ++r) {
            RngStream frozen_rng(opt.seed, kReplicaStreamBase + r);
            auto frozen = run_frozen(env, origin, opt.horizon, opt.cap, frozen_rng);
            out << r << ',' << frozen.nu << ',' << probe.return_counts[r] << ','
                << (frozen.capped ? 1 : 0) << ',' << (frozen.exhausted ? 1 : 0)
                << '\n';
        }
    }

    nlohmann::json summary = {
        {"replicas", opt.replicas},
        {"horizon", opt.horizon},
        {"cap", opt.cap},
        {"seed", opt.seed},
        {"box", opt.box_radius},
        {"mean_nu", gw.mean},
        {"half_width", gw.half_width},
        {"capped_fraction", gw.capped_fraction},
        {"exhausted_fraction", gw.exhausted_fraction},
        {"returns_ge_1", probe.fraction_ge_1},
        {"returns_ge_10", probe.fraction_ge_10},
        {"returns_ge_100", probe.fraction_ge_100},
        {"probe_capped_fraction", probe.capped_fraction},
    };
    if (opt.format == "csv") {
        std::ostringstream os;
        os << "mean_nu,half_width,capped_fraction,exhausted_fraction,"
              "returns_ge_1,returns_ge_10,returns_ge_100\n"
           << fmt_double(gw.mean) << ',' << fmt_double(gw.half_width) << ','
           << fmt_double(gw.capped_fraction) << ','
           << fmt_double(gw.exhausted_fraction) << ','
           << fmt_double(probe.fraction_ge_1) << ','
           << fmt_double(probe.fraction_ge_10) << ','
           << fmt_double(probe.fraction_ge_100) << '\n';
        std::cout << os.str();
    } else {
        std::cout << summary.dump(2) << "\n";
    }
    return 0;
}

struct CtBrwOptions {
    std::string graph_path;
    std::string out_path;
    std::string format = "json";
    double tol = 1e-12;
};

int cmd_ctbrw(const CtBrwOptions& opt) {
    auto adjacency = load_edge_list_file(opt.graph_path);
    auto result = ct_brw_critical_lambda(adjacency, opt.tol);
    if (opt.format == "csv") {
        emit("rho,critical_lambda\n" + fmt_double(result.rho) + "," +
                 fmt_double(result.critical_lambda) + "\n",
             opt.out_path);
    } else {
        nlohmann::json doc = {{"rho", result.rho},
                              {"critical_lambda", result.critical_lambda}};
        emit(doc.dump(2) + "\n", opt.out_path);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transience/recurrence laboratory for branching random walks "
                 "in random environment"};
    app.require_subcommand(1);

    ClassifyOptions copt;
    auto* classify = app.add_subcommand(
        "classify", "Evaluate the minimax transience criterion for a spec");
    classify->add_option("--spec", copt.spec_path, "environment spec (JSON)")
        ->required();
    classify->add_option("--tol", copt.tol, "optimizer tolerance");
    classify->add_option("--boundary-tol", copt.boundary_tol,
                         "|c-1| band that raises boundary_flag");
    classify->add_option("--out", copt.out_path, "also write the report here");
    classify->add_option("--format", copt.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    SpectralOptions sopt;
    auto* spectral = app.add_subcommand(
        "spectral", "Windowed spectral-radius convergence trace");
    spectral->add_option("--spec", sopt.spec_path, "environment spec (JSON)")
        ->required();
    spectral->add_option("--schedule", sopt.schedule, "window radii, increasing")
        ->required()
        ->delimiter(',');
    auto* seed_opt = spectral->add_option("--seed", sopt.seed, "realization seed");
    spectral->add_option("--tol", sopt.tol, "power iteration tolerance");
    spectral->add_option("--max-iter", sopt.max_iter, "power iteration budget");
    spectral->add_option("--out", sopt.out_path, "also write the CSV here");

    SimulateOptions mopt;
    auto* simulate = app.add_subcommand(
        "simulate", "Monte Carlo frozen-origin and recurrence probes");
    simulate->add_option("--spec", mopt.spec_path, "environment spec (JSON)")
        ->required();
    simulate->add_option("--replicas", mopt.replicas, "independent replicas");
    simulate->add_option("--horizon", mopt.horizon, "generations per replica");
    simulate->add_option("--cap", mopt.cap, "population cap per replica");
    simulate->add_option("--seed", mopt.seed, "master seed")->required();
    simulate->add_option("--box", mopt.box_radius, "simulation window radius");
    simulate->add_option("--out", mopt.out_path, "per-replica CSV path");
    simulate->add_option("--format", mopt.format, "summary format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    CtBrwOptions gopt;
    auto* ctbrw = app.add_subcommand(
        "ctbrw", "Critical birth rate of the continuous-time BRW on a graph");
    ctbrw->add_option("--graph", gopt.graph_path, "edge list file")->required();
    ctbrw->add_option("--tol", gopt.tol, "power iteration tolerance");
    ctbrw->add_option("--out", gopt.out_path, "also write the report here");
    ctbrw->add_option("--format", gopt.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (classify->parsed()) return cmd_classify(copt);
        if (spectral->parsed()) {
            sopt.seed_given = seed_opt->count() > 0;
            return cmd_spectral(sopt);
        }
        if (simulate->parsed()) return cmd_simulate(mopt);
        if (ctbrw->parsed()) return cmd_ctbrw(gopt);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DegeneracyError& e) {
        std::cerr << "degeneracy: " << e.what() << "\n";
        return 3;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
