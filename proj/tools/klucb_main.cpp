#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "klucb/concentration.hpp"
#include "klucb/family_io.hpp"
#include "klucb/harness.hpp"

namespace {

// Exit codes: 0 success, 2 configuration problems, 3 runtime failures.
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

klucb::InitDist parse_init_flag(const std::string& text) {
    if (text == "stationary") return klucb::InitDist::stationary();
    if (text == "uniform") return klucb::InitDist::uniform();
    if (text.rfind("point:", 0) == 0) {
        const long s = std::stol(text.substr(6));
        if (s < 0) throw klucb::ConfigError("init state must be nonnegative");
        return klucb::InitDist::point(static_cast<std::size_t>(s));
    }
    throw klucb::ConfigError("bad --init value \"" + text +
                             "\"; expected stationary, uniform or point:<state>");
}

int run_simulate(const std::string& config_path, long reps, long seed, const std::string& out,
                 int workers) {
    klucb::ExperimentConfig cfg = klucb::load_config_file(config_path);
    if (reps > 0) cfg.reps = reps;
    if (seed >= 0) cfg.master_seed = static_cast<std::uint64_t>(seed);
    if (!out.empty()) cfg.output_dir = out;
    const klucb::ExperimentResult res = klucb::run_experiment(cfg, workers);
    const std::vector<klucb::SummaryRow> rows = klucb::summarize(res);
    if (cfg.output_dir.empty()) {
        std::cout << klucb::emit_csv(rows);
    } else {
        klucb::write_outputs(res, rows, cfg.output_dir);
        std::cout << cfg.output_dir << "/summary.csv\n";
    }
    return 0;
}

int run_verify(const std::string& family_path, double theta0, const std::string& event_name,
               double mu, double eps, long n, long reps, long seed, const std::string& init_text,
               int workers) {
    const klucb::FamilySpec fam = klucb::load_family_file(family_path);
    klucb::TailEvent event = klucb::TailEvent::chernoff(mu);
    if (event_name == "maximal") event = klucb::TailEvent::maximal(eps);
    else if (event_name != "chernoff")
        throw klucb::ConfigError("--event must be chernoff or maximal");
    const klucb::BoundReport report =
        klucb::empirical_tail(fam, theta0, event, n, reps, static_cast<std::uint64_t>(seed),
                              parse_init_flag(init_text), workers);
    std::printf("event,level,n,reps,bound,empirical,stderr\n");
    std::printf("%s,%.17g,%ld,%ld,%.17g,%.17g,%.17g\n", report.event.c_str(), report.level,
                report.n, report.replications, report.bound_value, report.empirical,
                report.stderr_);
    return 0;
}

int run_lower_bound(const std::string& config_path) {
    const klucb::ExperimentConfig cfg = klucb::load_config_file(config_path);
    const klucb::InstanceProfile prof = klucb::profile(cfg.family, cfg.thetas, cfg.M);
    std::printf("%.17g\n", klucb::lower_bound_constant(prof, cfg.family));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rested Markov bandits: simulation and concentration checks"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "Run a bandit experiment from a JSON config");
    std::string sim_config;
    long sim_reps = 0, sim_seed = -1;
    std::string sim_out;
    int sim_workers = 1;
    sim->add_option("--config", sim_config, "experiment config JSON")->required();
    sim->add_option("--reps", sim_reps, "override replication count");
    sim->add_option("--seed", sim_seed, "override master seed");
    sim->add_option("--out", sim_out, "override output directory");
    sim->add_option("--workers", sim_workers, "worker threads");

    auto* ver = app.add_subcommand("verify-concentration",
                                   "Compare an analytic tail bound with Monte Carlo");
    std::string ver_family, ver_event = "chernoff", ver_init = "stationary";
    double ver_theta0 = 0.0, ver_mu = 0.0, ver_eps = 2.0;
    long ver_n = 0, ver_reps = 0, ver_seed = 0;
    int ver_workers = 1;
    ver->add_option("--family", ver_family, "path to a family spec JSON file")->required();
    ver->add_option("--theta0", ver_theta0, "chain parameter");
    ver->add_option("--event", ver_event, "chernoff or maximal");
    ver->add_option("--mu", ver_mu, "level for the chernoff event");
    ver->add_option("--eps", ver_eps, "weight for the maximal event");
    ver->add_option("--n", ver_n, "trajectory length")->required();
    ver->add_option("--reps", ver_reps, "replications")->required();
    ver->add_option("--seed", ver_seed, "seed");
    ver->add_option("--init", ver_init, "stationary, uniform or point:<state>");
    ver->add_option("--workers", ver_workers, "worker threads");

    auto* low = app.add_subcommand("lower-bound", "Print the instance's asymptotic constant");
    std::string low_config;
    low->add_option("--config", low_config, "experiment config JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (sim->parsed()) return run_simulate(sim_config, sim_reps, sim_seed, sim_out, sim_workers);
        if (ver->parsed())
            return run_verify(ver_family, ver_theta0, ver_event, ver_mu, ver_eps, ver_n, ver_reps,
                              ver_seed, ver_init, ver_workers);
        if (low->parsed()) return run_lower_bound(low_config);
    } catch (const klucb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const klucb::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}
