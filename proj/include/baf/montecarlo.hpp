#pragma once

#include "baf/channel_model.hpp"
#include "baf/protocol_sim.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace baf {

/// Monte Carlo statistic with a normal-approximation 95% interval.
struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n_trials = 0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;

    /// Binomial proportion events / n; interval clipped to [0, 1].
    static Estimate proportion(std::uint64_t events, std::uint64_t n);
    /// Sample mean and standard error from integer sums of x and x^2.
    static Estimate from_sums(std::uint64_t sum, std::uint64_t sum_sq, std::uint64_t n);
};

struct McOptions {
    std::uint64_t n_trials = 1'000'000;
    std::uint64_t master_seed = 1;
    unsigned workers = 0; // 0: BAF_WORKERS or hardware concurrency
    RelayOrderPolicy order = RelayOrderPolicy::FixedIndex;
};

/// Statistics gathered from one pass over the trial substreams.
struct BlockStatistics {
    Estimate outage;
    Estimate expected_n;
    Estimate source_failure;
    std::uint64_t outage_events = 0;
};

struct RateSearchResult {
    double rate = 0.0;
    double achieved_outage = 0.0;
    std::size_t iterations = 0;
    double r_lo = 0.0;
    double r_hi = 0.0;
};

struct Lemma1Point {
    double g;
    double x;
    Estimate ratio; // Pr(U + VW/(V+W+x) < g) / g^2
    std::uint64_t events;
};

/// Maps the threshold g to the noise-coupling offset x.
using OffsetForThreshold = std::function<double(double)>;

/// x = factor * g.
OffsetForThreshold offset_proportional(double factor);
/// x = tau / SNR under tau = sqrt(R SNR), where R/SNR is chosen so that the
/// single-relay exact threshold equals g.
OffsetForThreshold offset_from_tau_policy();

BlockStatistics simulate_blocks(const LinkVariances& variances, const SystemParams& params, const McOptions& opts);

Estimate estimate_outage(const LinkVariances& variances, const SystemParams& params, const McOptions& opts);

Estimate estimate_expected_n(const LinkVariances& variances, const SystemParams& params, const McOptions& opts);

/// Estimates Pr(U + VW/(V+W+x) < g) / g^2 for each g in a strictly decreasing
/// positive sequence, reusing the same draws for every g. Throws
/// ConvergenceFailure when fewer than 100 events occur at the smallest g.
std::vector<Lemma1Point> lemma1_ratio_experiment(double sigma_u2, double sigma_v2, double sigma_w2,
                                                 std::span<const double> g_sequence,
                                                 const OffsetForThreshold& offset, const McOptions& opts);

/// Pr(U + VW/(V+W+x) < t) for U ~ Exp(sigma_u2), V ~ Exp(sigma_v2), W ~ Exp(sigma_w2)
/// by nested adaptive Gauss-Kronrod quadrature. V and W are truncated at 40
/// means each, so the neglected probability mass is below 2 e^-40. Throws
/// ConvergenceFailure when the estimated relative error exceeds 1e-6.
double quadrature_outage_probability(double sigma_u2, double sigma_v2, double sigma_w2, double t, double x);

/// Single-relay outage oracle: U = |h_sd|^2, V = |h_sr|^2, W = |h_rd|^2.
double quadrature_outage_oracle(const LinkVariances& variances, double t, double x);

/// Largest rate whose empirical outage stays below epsilon, by bisection with
/// common random numbers. Requires epsilon * n_trials >= 100.
RateSearchResult empirical_eps_outage_capacity(const LinkVariances& variances, const SystemParams& params,
                                               const McOptions& opts);

/// Rate R with SNR fixed such that the single-relay exact threshold under
/// tau = sqrt(R SNR) equals t. Inverse of outage_threshold_g for K = 1.
double rate_for_threshold(double t, double snr);

} // namespace baf
