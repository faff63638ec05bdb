#pragma once

#include "baf/channel_model.hpp"
#include "baf/protocol_sim.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace baf {

enum class Command { Analytic, Outage, Capacity, Ratio, Lemma1, Placement };
enum class OutputFormat { Csv, Jsonl };

struct SnrSweep {
    double start_db = -10.0;
    double stop_db = 10.0;
    double step_db = 1.0;

    /// Points start, start+step, ... up to stop (inclusive, with a 1e-9 dB slack).
    [[nodiscard]] std::vector<double> points_db() const;
};

/// Parses "start:stop:step" (or a single value) in dB.
SnrSweep parse_snr_sweep(const std::string& text);

struct ExperimentConfig {
    Command command = Command::Analytic;

    // At most one of these; unit variances for k_relays relays when neither is set.
    std::optional<NetworkGeometry> geometry;
    std::optional<LinkVariances> variances;

    SnrSweep snr_sweep;
    std::vector<double> rates;
    double epsilon = 1e-3;
    std::size_t k_relays = 1;
    std::uint64_t n_trials = 1'000'000;
    std::uint64_t master_seed = 1;
    ThresholdMode mode = ThresholdMode::Exact;
    RelayOrderPolicy order = RelayOrderPolicy::FixedIndex;
    std::string output_path; // empty: stdout
    OutputFormat format = OutputFormat::Csv;

    // lemma1
    std::vector<double> lemma_g{0.1, 0.05, 0.02, 0.01};
    bool lemma_x_from_policy = false;
    double lemma_x_ratio = 0.1;

    // placement
    double pathloss_exponent = 3.0;
    std::size_t grid_points = 201;

    /// Variances implied by geometry / explicit variances / unit default.
    [[nodiscard]] LinkVariances link_variances() const;
    void validate() const;
};

/// Standard ratio-sweep setting (epsilon 1e-3, R in {0.009, 0.05, 0.1},
/// SNR -10..10 dB in 1 dB steps, unit source-destination variance).
void apply_fig2_preset(ExperimentConfig& config);

/// Vocabulary of metric_name values; see README for meanings.
const std::vector<std::string>& metric_vocabulary();

struct ResultRow {
    std::optional<double> snr_db;
    std::optional<double> rate;
    double epsilon = 0.0;
    std::size_t k_relays = 1;
    std::string metric_name;
    double value = 0.0;
    std::optional<double> std_error;
    std::optional<std::uint64_t> n_trials;
    std::optional<std::uint64_t> seed;
};

inline constexpr const char* kCsvHeader = "snr_db,rate,epsilon,k_relays,metric_name,value,stderr,n_trials,seed";

struct CommandResult {
    std::vector<ResultRow> rows;
    std::vector<std::string> warnings; // human-readable, one line each
};

CommandResult cmd_analytic(const ExperimentConfig& config);
CommandResult cmd_ratio(const ExperimentConfig& config);
CommandResult cmd_outage(const ExperimentConfig& config);
CommandResult cmd_capacity(const ExperimentConfig& config);
CommandResult cmd_lemma1(const ExperimentConfig& config);
CommandResult cmd_placement(const ExperimentConfig& config);

CommandResult run_command(const ExperimentConfig& config);

/// Shortest round-trip decimal representation; identical input gives identical text.
std::string format_number(double v);

void write_rows(std::ostream& out, const std::vector<ResultRow>& rows, OutputFormat format);

} // namespace baf
