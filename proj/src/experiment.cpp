#include "baf/experiment.hpp"

#include "baf/analytic_capacity.hpp"
#include "baf/errors.hpp"
#include "baf/montecarlo.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

namespace baf {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::vector<double> parse_doubles(const std::string& text, char sep)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        double v = 0.0;
        const char* b = item.data();
        const char* e = item.data() + item.size();
        auto [ptr, ec] = std::from_chars(b, e, v);
        if (ec != std::errc{} || ptr != e)
            throw InvalidParameter("cannot parse number '" + item + "'");
        out.push_back(v);
    }
    return out;
}

McOptions mc_options(const ExperimentConfig& c)
{
    McOptions o;
    o.n_trials = c.n_trials;
    o.master_seed = c.master_seed;
    o.order = c.order;
    return o;
}

SystemParams params_at(const ExperimentConfig& c, double snr_db, double rate)
{
    SystemParams p;
    p.snr = db_to_linear(snr_db);
    p.rate = rate;
    p.epsilon = c.epsilon;
    p.k_relays = c.k_relays;
    p.threshold_mode = c.mode;
    return p;
}

ResultRow analytic_row(const ExperimentConfig& c, std::optional<double> snr_db, std::optional<double> rate,
                       std::string metric, double value)
{
    ResultRow r;
    r.snr_db = snr_db;
    r.rate = rate;
    r.epsilon = c.epsilon;
    r.k_relays = c.k_relays;
    r.metric_name = std::move(metric);
    r.value = value;
    return r;
}

ResultRow mc_row(const ExperimentConfig& c, std::optional<double> snr_db, std::optional<double> rate,
                 std::string metric, double value, std::optional<double> std_error)
{
    ResultRow r = analytic_row(c, snr_db, rate, std::move(metric), value);
    r.std_error = std_error;
    r.n_trials = c.n_trials;
    r.seed = c.master_seed;
    return r;
}

void note_tau_clamp(CommandResult& out, const SystemParams& p, double snr_db)
{
    if (p.rate > 0.0 && resolve_tau(p).clamped) {
        out.warnings.push_back("tau clamped to 1 at SNR " + format_number(snr_db) + " dB, R=" +
                               format_number(p.rate) + " (outside the bursty low-SNR regime)");
    }
}

void require_single_relay(const ExperimentConfig& c, const char* command)
{
    if (c.k_relays != 1)
        throw InvalidParameter(std::string(command) + " is defined for a single relay (--k 1)");
}

} // namespace

std::vector<double> SnrSweep::points_db() const
{
    std::vector<double> pts;
    if (!(step_db > 0.0))
        throw InvalidParameter("SNR sweep step must be positive");
    if (stop_db < start_db)
        throw InvalidParameter("SNR sweep stop must not precede start");
    const auto n = static_cast<std::size_t>(std::floor((stop_db - start_db) / step_db + 1e-9)) + 1;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        pts.push_back(start_db + static_cast<double>(i) * step_db);
    return pts;
}

SnrSweep parse_snr_sweep(const std::string& text)
{
    const auto v = parse_doubles(text, ':');
    if (v.size() == 1)
        return SnrSweep{v[0], v[0], 1.0};
    if (v.size() != 3)
        throw InvalidParameter("SNR sweep must be <start:stop:step> or a single value");
    SnrSweep s{v[0], v[1], v[2]};
    (void)s.points_db();
    return s;
}

LinkVariances ExperimentConfig::link_variances() const
{
    if (geometry && variances)
        throw InvalidParameter("give either a relay geometry or explicit variances, not both");
    LinkVariances v;
    if (geometry)
        v = variances_from_geometry(*geometry);
    else if (variances)
        v = *variances;
    else
        v = LinkVariances::unit(k_relays);
    v.validate();
    if (v.relay_count() != k_relays)
        throw InvalidParameter("relay count " + std::to_string(k_relays) + " does not match the " +
                               std::to_string(v.relay_count()) + " relays described");
    return v;
}

void ExperimentConfig::validate() const
{
    if (k_relays < 1)
        throw InvalidParameter("at least one relay is required");
    (void)snr_sweep.points_db();
    (void)link_variances();
    if (!(epsilon >= 0.0 && epsilon < 1.0))
        throw InvalidParameter("epsilon must lie in [0, 1)");
    for (double r : rates)
        if (!(r >= 0.0) || !std::isfinite(r))
            throw InvalidParameter("rates must be non-negative");
    if (n_trials == 0)
        throw InvalidParameter("trial count must be positive");
}

void apply_fig2_preset(ExperimentConfig& config)
{
    config.epsilon = 1e-3;
    config.rates = {0.009, 0.05, 0.1};
    config.snr_sweep = SnrSweep{-10.0, 10.0, 1.0};
    config.k_relays = 1;
    config.geometry.reset();
    config.variances = LinkVariances::unit(1);
}

const std::vector<std::string>& metric_vocabulary()
{
    static const std::vector<std::string> vocab{
        "c_baf_no_fb",   "c_baf_ir",        "c_csb",          "c_baf_k",       "c_csb_k",
        "expected_n_exact", "expected_n_paper", "expected_n_mc", "delta_upper", "eps_feasible",
        "outage_prob",   "outage_quadrature", "c_eps_empirical", "achieved_outage", "lemma1_g",
        "lemma1_x",      "lemma1_ratio",    "lemma1_constant", "relay_pos",     "argmax_analytic",
        "argmax_empirical",
    };
    return vocab;
}

CommandResult cmd_analytic(const ExperimentConfig& c)
{
    c.validate();
    const LinkVariances v = c.link_variances();
    CommandResult out;
    for (double snr_db : c.snr_sweep.points_db()) {
        const double snr = db_to_linear(snr_db);
        const double c_k = c_eps_baf_k(v, snr, c.epsilon);
        const double c_csb_k = c_eps_cutset(v, snr, c.epsilon);

        if (c.k_relays > 1) {
            out.rows.push_back(analytic_row(c, snr_db, std::nullopt, "c_baf_k", c_k));
            out.rows.push_back(analytic_row(c, snr_db, std::nullopt, "c_csb_k", c_csb_k));
            continue;
        }

        const double c_no_fb = c_eps_baf_no_feedback(v, snr, c.epsilon);
        // Without an explicit rate list the operating rate is the epsilon-outage rate itself.
        const std::vector<double> rates = c.rates.empty() ? std::vector<double>{c_no_fb} : c.rates;
        for (double rate : rates) {
            const SystemParams p = params_at(c, snr_db, rate);
            note_tau_clamp(out, p, snr_db);
            const double en_exact = expected_n_one_relay(v, p, ExpectedNMode::Exact);
            const double en_paper = expected_n_one_relay(v, p, ExpectedNMode::PaperApprox);
            out.rows.push_back(analytic_row(c, snr_db, rate, "c_baf_no_fb", c_no_fb));
            out.rows.push_back(analytic_row(c, snr_db, rate, "c_baf_ir", c_eps_baf_incremental(v, p, en_exact)));
            out.rows.push_back(analytic_row(c, snr_db, rate, "c_csb", c_eps_cutset(v, snr, c.epsilon)));
            out.rows.push_back(analytic_row(c, snr_db, rate, "c_baf_k", c_k));
            out.rows.push_back(analytic_row(c, snr_db, rate, "c_csb_k", c_csb_k));
            out.rows.push_back(analytic_row(c, snr_db, rate, "expected_n_exact", en_exact));
            out.rows.push_back(analytic_row(c, snr_db, rate, "expected_n_paper", en_paper));
        }
    }
    return out;
}

CommandResult cmd_ratio(const ExperimentConfig& c)
{
    c.validate();
    if (c.rates.empty())
        throw InvalidParameter("ratio needs at least one rate (--rate)");
    const LinkVariances v = c.link_variances();
    CommandResult out;
    for (double rate : c.rates) {
        for (double snr_db : c.snr_sweep.points_db()) {
            const SystemParams p = params_at(c, snr_db, rate);
            double en = 0.0;
            std::optional<double> en_err;
            std::string en_metric;
            if (c.k_relays == 1) {
                en = expected_n_one_relay(v, p, ExpectedNMode::PaperApprox);
                en_metric = "expected_n_paper";
            } else {
                const Estimate e = estimate_expected_n(v, p, mc_options(c));
                en = e.mean;
                en_err = e.std_error;
                en_metric = "expected_n_mc";
            }
            const FeasibilityCheck f = epsilon_feasibility(c.epsilon, en, c.k_relays);
            if (!f.feasible) {
                out.warnings.push_back("epsilon=" + format_number(c.epsilon) + " exceeds the feasible bound " +
                                       format_number(f.epsilon_max) + " at SNR " + format_number(snr_db) +
                                       " dB, R=" + format_number(rate));
            }
            // Delta never exceeds 1; the bound (1+K eps)/E_K(N) is loose when infeasible.
            const double delta = std::min(1.0, delta_ratio(c.epsilon, en, c.k_relays));
            if (en_err) {
                out.rows.push_back(mc_row(c, snr_db, rate, en_metric, en, en_err));
                out.rows.push_back(mc_row(c, snr_db, rate, "delta_upper", delta, std::nullopt));
            } else {
                out.rows.push_back(analytic_row(c, snr_db, rate, en_metric, en));
                out.rows.push_back(analytic_row(c, snr_db, rate, "delta_upper", delta));
            }
            out.rows.push_back(analytic_row(c, snr_db, rate, "eps_feasible", f.feasible ? 1.0 : 0.0));
        }
    }
    return out;
}

CommandResult cmd_outage(const ExperimentConfig& c)
{
    c.validate();
    if (c.rates.empty())
        throw InvalidParameter("outage needs at least one rate (--rate)");
    if (c.n_trials < 10'000)
        throw InvalidParameter("outage needs at least 10000 trials");
    const LinkVariances v = c.link_variances();
    CommandResult out;
    for (double snr_db : c.snr_sweep.points_db()) {
        for (double rate : c.rates) {
            const SystemParams p = params_at(c, snr_db, rate);
            note_tau_clamp(out, p, snr_db);
            const BlockStatistics s = simulate_blocks(v, p, mc_options(c));
            if (rate > 0.0 && s.outage_events < 100) {
                throw InvalidParameter("only " + std::to_string(s.outage_events) + " outage events at SNR " +
                                       format_number(snr_db) + " dB, R=" + format_number(rate) +
                                       "; increase --trials (rare-event probabilities below 1e-6 are not supported)");
            }
            out.rows.push_back(mc_row(c, snr_db, rate, "outage_prob", s.outage.mean, s.outage.std_error));
            out.rows.push_back(mc_row(c, snr_db, rate, "expected_n_mc", s.expected_n.mean, s.expected_n.std_error));
            if (c.k_relays == 1 && c.mode == ThresholdMode::Exact) {
                double q = 0.0;
                if (rate > 0.0) {
                    const double t = outage_threshold_g(p, 1, ThresholdMode::Exact);
                    q = quadrature_outage_oracle(v, t, resolve_tau(p).value / p.snr);
                }
                out.rows.push_back(analytic_row(c, snr_db, rate, "outage_quadrature", q));
            }
        }
    }
    return out;
}

CommandResult cmd_capacity(const ExperimentConfig& c)
{
    c.validate();
    const LinkVariances v = c.link_variances();
    if (c.epsilon * static_cast<double>(c.n_trials) < 100.0)
        throw InvalidParameter("epsilon * trials must be at least 100; increase --trials");
    CommandResult out;
    for (double snr_db : c.snr_sweep.points_db()) {
        const SystemParams p = params_at(c, snr_db, 0.0);
        const RateSearchResult r = empirical_eps_outage_capacity(v, p, mc_options(c));
        const Estimate achieved = Estimate::proportion(
            static_cast<std::uint64_t>(std::llround(r.achieved_outage * static_cast<double>(c.n_trials))), c.n_trials);
        out.rows.push_back(mc_row(c, snr_db, std::nullopt, "c_eps_empirical", r.rate, std::nullopt));
        out.rows.push_back(mc_row(c, snr_db, r.rate, "achieved_outage", achieved.mean, achieved.std_error));
        const double snr = p.snr;
        if (c.k_relays == 1)
            out.rows.push_back(analytic_row(c, snr_db, std::nullopt, "c_baf_no_fb", c_eps_baf_no_feedback(v, snr, c.epsilon)));
        else
            out.rows.push_back(analytic_row(c, snr_db, std::nullopt, "c_baf_k", c_eps_baf_k(v, snr, c.epsilon)));
    }
    return out;
}

CommandResult cmd_lemma1(const ExperimentConfig& c)
{
    c.validate();
    require_single_relay(c, "lemma1");
    const LinkVariances v = c.link_variances();
    const auto offset = c.lemma_x_from_policy ? offset_from_tau_policy() : offset_proportional(c.lemma_x_ratio);
    const auto points = lemma1_ratio_experiment(v.sigma_sd2, v.sigma_sr2[0], v.sigma_rd2[0], c.lemma_g, offset,
                                                mc_options(c));
    CommandResult out;
    for (const Lemma1Point& pt : points) {
        out.rows.push_back(analytic_row(c, std::nullopt, std::nullopt, "lemma1_g", pt.g));
        out.rows.push_back(analytic_row(c, std::nullopt, std::nullopt, "lemma1_x", pt.x));
        out.rows.push_back(mc_row(c, std::nullopt, std::nullopt, "lemma1_ratio", pt.ratio.mean, pt.ratio.std_error));
    }
    out.rows.push_back(analytic_row(c, std::nullopt, std::nullopt, "lemma1_constant",
                                    lemma1_constant(v.sigma_sd2, v.sigma_sr2[0], v.sigma_rd2[0]).value));
    return out;
}

CommandResult cmd_placement(const ExperimentConfig& c)
{
    c.validate();
    require_single_relay(c, "placement");
    if (c.epsilon * static_cast<double>(c.n_trials) < 100.0)
        throw InvalidParameter("epsilon * trials must be at least 100; increase --trials");
    const double snr_db = c.snr_sweep.points_db().front();
    const double snr = db_to_linear(snr_db);
    const double d_star = optimal_relay_position(c.pathloss_exponent, c.grid_points);

    CommandResult out;
    double best_mc = -1.0;
    double best_mc_pos = 0.0;
    for (double d : placement_grid(c.grid_points)) {
        NetworkGeometry geom{1.0, {d}, c.pathloss_exponent};
        const LinkVariances v = variances_from_geometry(geom);
        const SystemParams p = params_at(c, snr_db, 0.0);
        const RateSearchResult r = empirical_eps_outage_capacity(v, p, mc_options(c));
        out.rows.push_back(analytic_row(c, snr_db, std::nullopt, "relay_pos", d));
        out.rows.push_back(analytic_row(c, snr_db, std::nullopt, "c_baf_no_fb", c_eps_baf_no_feedback(v, snr, c.epsilon)));
        out.rows.push_back(mc_row(c, snr_db, std::nullopt, "c_eps_empirical", r.rate, std::nullopt));
        if (r.rate > best_mc) {
            best_mc = r.rate;
            best_mc_pos = d;
        }
    }
    out.rows.push_back(analytic_row(c, snr_db, std::nullopt, "argmax_analytic", d_star));
    out.rows.push_back(mc_row(c, snr_db, std::nullopt, "argmax_empirical", best_mc_pos, std::nullopt));
    return out;
}

CommandResult run_command(const ExperimentConfig& config)
{
    switch (config.command) {
    case Command::Analytic: return cmd_analytic(config);
    case Command::Outage: return cmd_outage(config);
    case Command::Capacity: return cmd_capacity(config);
    case Command::Ratio: return cmd_ratio(config);
    case Command::Lemma1: return cmd_lemma1(config);
    case Command::Placement: return cmd_placement(config);
    }
    throw InvalidParameter("unknown command");
}

std::string format_number(double v)
{
    if (v == 0.0)
        return "0";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void write_rows(std::ostream& out, const std::vector<ResultRow>& rows, OutputFormat format)
{
    if (format == OutputFormat::Csv) {
        out << kCsvHeader << '\n';
        for (const ResultRow& r : rows) {
            out << (r.snr_db ? format_number(*r.snr_db) : "") << ','
                << (r.rate ? format_number(*r.rate) : "") << ',' << format_number(r.epsilon) << ','
                << r.k_relays << ',' << r.metric_name << ',' << format_number(r.value) << ','
                << (r.std_error ? format_number(*r.std_error) : "") << ','
                << (r.n_trials ? std::to_string(*r.n_trials) : "") << ','
                << (r.seed ? std::to_string(*r.seed) : "") << '\n';
        }
        return;
    }
    for (const ResultRow& r : rows) {
        nlohmann::ordered_json j;
        j["snr_db"] = r.snr_db ? nlohmann::ordered_json(*r.snr_db) : nullptr;
        j["rate"] = r.rate ? nlohmann::ordered_json(*r.rate) : nullptr;
        j["epsilon"] = r.epsilon;
        j["k_relays"] = r.k_relays;
        j["metric_name"] = r.metric_name;
        j["value"] = r.value;
        j["stderr"] = r.std_error ? nlohmann::ordered_json(*r.std_error) : nullptr;
        j["n_trials"] = r.n_trials ? nlohmann::ordered_json(*r.n_trials) : nullptr;
        j["seed"] = r.seed ? nlohmann::ordered_json(*r.seed) : nullptr;
        out << j.dump() << '\n';
    }
}

} // namespace baf
