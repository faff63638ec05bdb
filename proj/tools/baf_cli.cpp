// Command-line front end for the bursty amplify-and-forward experiments.
//
//   baf analytic  --snr-db -20:0:2 --epsilon 0.01
//   baf ratio     --preset fig2
//   baf outage    --snr-db -10 --rate 0.01 --trials 1000000
//   baf capacity  --snr-db -20 --epsilon 0.001 --trials 1000000
//   baf lemma1    --trials 10000000
//   baf placement --pathloss 3 --snr-db -20 --epsilon 0.01 --trials 100000
//
// Exit codes: 0 success, 1 invalid parameters, 2 convergence failure.

#include "baf/errors.hpp"
#include "baf/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

namespace {

constexpr int kExitInvalid = 1;
constexpr int kExitConvergence = 2;

struct RawOptions {
    std::string snr_db;
    std::vector<double> rates;
    double epsilon = 0.0;
    std::size_t k = 1;
    std::vector<double> relay_pos;
    double pathloss = 3.0;
    double var_sd = 1.0;
    std::vector<double> var_sr;
    std::vector<double> var_rd;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::string mode = "exact";
    std::string out;
    std::string format = "csv";
    std::string preset;
    std::vector<double> lemma_g;
    std::string lemma_x = "ratio:0.1";
    std::size_t grid = 201;
    std::string relay_order = "fixed";
};

baf::ExperimentConfig build_config(const CLI::App& app, const RawOptions& raw, baf::Command command)
{
    auto given = [&](const char* name) { return app.count(name) > 0; };

    baf::ExperimentConfig cfg;
    cfg.command = command;
    if (given("--preset")) {
        if (raw.preset != "fig2")
            throw baf::InvalidParameter("unknown preset '" + raw.preset + "'");
        baf::apply_fig2_preset(cfg);
    }

    if (given("--snr-db"))
        cfg.snr_sweep = baf::parse_snr_sweep(raw.snr_db);
    if (given("--rate"))
        cfg.rates = raw.rates;
    if (given("--epsilon"))
        cfg.epsilon = raw.epsilon;
    if (given("--trials"))
        cfg.n_trials = raw.trials;
    if (given("--seed"))
        cfg.master_seed = raw.seed;
    if (given("--pathloss"))
        cfg.pathloss_exponent = raw.pathloss;
    if (given("--grid"))
        cfg.grid_points = raw.grid;
    if (given("--g"))
        cfg.lemma_g = raw.lemma_g;

    const bool has_geometry = given("--relay-pos");
    const bool has_variances = given("--var-sd") || given("--var-sr") || given("--var-rd");
    if (has_geometry && has_variances)
        throw baf::InvalidParameter("give either --relay-pos or explicit --var-* variances, not both");
    if (has_geometry) {
        cfg.geometry = baf::NetworkGeometry{1.0, raw.relay_pos, raw.pathloss};
        cfg.variances.reset();
        cfg.k_relays = raw.relay_pos.size();
    } else if (has_variances) {
        const std::size_t k = std::max(raw.var_sr.size(), raw.var_rd.size());
        baf::LinkVariances v;
        v.sigma_sd2 = raw.var_sd;
        v.sigma_sr2 = raw.var_sr.empty() ? std::vector<double>(k, 1.0) : raw.var_sr;
        v.sigma_rd2 = raw.var_rd.empty() ? std::vector<double>(k, 1.0) : raw.var_rd;
        if (k == 0) {
            v.sigma_sr2.assign(given("--k") ? raw.k : 1, 1.0);
            v.sigma_rd2 = v.sigma_sr2;
        }
        cfg.geometry.reset();
        cfg.variances = v;
        cfg.k_relays = v.relay_count();
    }
    if (given("--k")) {
        if ((has_geometry || has_variances) && raw.k != cfg.k_relays)
            throw baf::InvalidParameter("--k disagrees with the number of relays described");
        cfg.k_relays = raw.k;
        if (cfg.variances && cfg.variances->relay_count() != raw.k && !has_variances)
            cfg.variances = baf::LinkVariances::unit(raw.k);
    }

    if (raw.mode == "exact")
        cfg.mode = baf::ThresholdMode::Exact;
    else if (raw.mode == "linearized")
        cfg.mode = baf::ThresholdMode::Linearized;
    else
        throw baf::InvalidParameter("--mode must be exact or linearized");

    if (raw.format == "csv")
        cfg.format = baf::OutputFormat::Csv;
    else if (raw.format == "jsonl")
        cfg.format = baf::OutputFormat::Jsonl;
    else
        throw baf::InvalidParameter("--format must be csv or jsonl");

    if (raw.relay_order == "fixed")
        cfg.order = baf::RelayOrderPolicy::FixedIndex;
    else if (raw.relay_order == "best")
        cfg.order = baf::RelayOrderPolicy::BestRelayFirst;
    else
        throw baf::InvalidParameter("--relay-order must be fixed or best");

    if (raw.lemma_x == "policy") {
        cfg.lemma_x_from_policy = true;
    } else if (raw.lemma_x.rfind("ratio:", 0) == 0) {
        try {
            cfg.lemma_x_ratio = std::stod(raw.lemma_x.substr(6));
        } catch (const std::exception&) {
            throw baf::InvalidParameter("--lemma-x ratio must be numeric");
        }
    } else {
        throw baf::InvalidParameter("--lemma-x must be 'policy' or 'ratio:<factor>'");
    }

    cfg.output_path = raw.out;
    return cfg;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Outage capacity of bursty amplify-and-forward with incremental relaying"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Flat key=value file; command-line flags override it");

    RawOptions raw;
    app.add_option("--snr-db", raw.snr_db, "SNR sweep start:stop:step in dB (or a single value)");
    app.add_option("--rate", raw.rates, "Target rates in bit/s/Hz, comma separated")->delimiter(',');
    app.add_option("--epsilon", raw.epsilon, "Target outage probability");
    app.add_option("--k", raw.k, "Number of relays");
    app.add_option("--relay-pos", raw.relay_pos, "Relay positions in (0,1), comma separated")->delimiter(',');
    app.add_option("--pathloss", raw.pathloss, "Path-loss exponent");
    app.add_option("--var-sd", raw.var_sd, "Explicit source-destination variance");
    app.add_option("--var-sr", raw.var_sr, "Explicit source-relay variances")->delimiter(',');
    app.add_option("--var-rd", raw.var_rd, "Explicit relay-destination variances")->delimiter(',');
    app.add_option("--trials", raw.trials, "Monte Carlo trials per estimate");
    app.add_option("--seed", raw.seed, "Master seed (64-bit)");
    app.add_option("--mode", raw.mode, "Decode threshold: exact|linearized");
    app.add_option("--out", raw.out, "Output file (default stdout)");
    app.add_option("--format", raw.format, "csv|jsonl");
    app.add_option("--preset", raw.preset, "Named preset (fig2)");
    app.add_option("--g", raw.lemma_g, "lemma1: decreasing thresholds, comma separated")->delimiter(',');
    app.add_option("--lemma-x", raw.lemma_x, "lemma1: offset x as 'ratio:<factor>' of g or 'policy'");
    app.add_option("--grid", raw.grid, "placement: number of grid points on (0,1)");
    app.add_option("--relay-order", raw.relay_order, "fixed|best");

    const std::map<std::string, baf::Command> commands{
        {"analytic", baf::Command::Analytic}, {"outage", baf::Command::Outage},
        {"capacity", baf::Command::Capacity}, {"ratio", baf::Command::Ratio},
        {"lemma1", baf::Command::Lemma1},     {"placement", baf::Command::Placement},
    };
    for (const auto& [name, cmd] : commands)
        app.add_subcommand(name, "Run the " + name + " experiment")->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }

    try {
        const std::string name = app.get_subcommands().front()->get_name();
        const baf::ExperimentConfig cfg = build_config(app, raw, commands.at(name));
        const baf::CommandResult result = baf::run_command(cfg);
        for (const std::string& w : result.warnings)
            std::cerr << "warning: " << w << '\n';

        if (cfg.output_path.empty()) {
            baf::write_rows(std::cout, result.rows, cfg.format);
        } else {
            std::ofstream file(cfg.output_path, std::ios::binary | std::ios::trunc);
            if (!file)
                throw baf::InvalidParameter("cannot open output file " + cfg.output_path);
            baf::write_rows(file, result.rows, cfg.format);
        }
    } catch (const baf::ConvergenceFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConvergence;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    return 0;
}
