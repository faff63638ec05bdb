#pragma once

#include "baf/channel_model.hpp"

#include <cstddef>

namespace baf {

/// Limit of Pr(U + VW/(V+W+x) < g) / g^2 for exponential U, V, W.
struct LemmaConstant {
    double value;
};

/// How E(N) is obtained for the single-relay closed forms.
enum class ExpectedNMode {
    Exact,       // exponential CDF at the exact source-only threshold
    PaperApprox  // 1 + log2(e) R / (sigma_sd^2 SNR), clamped to [1, 2]
};

struct CapacityReport {
    double c_baf_no_fb;
    double c_baf_ir;
    double c_csb_ir;
    double delta_ratio_upper;
    double expected_n;
};

struct MinBoundResult {
    double lhs;
    double rhs;
    bool holds;
};

struct FeasibilityCheck {
    double epsilon_max; // (E_K(N) - 1) / K
    bool feasible;
};

/// Contribution of one relay to the channel aggregate:
/// g_rd g_sr / (g_rd + g_sr + tau / SNR).
double relay_term(double g_sr, double g_rd, double tau, double snr) noexcept;

/// g_sd + sum over relays of relay_term, accumulated in relay index order.
double channel_aggregate(const ChannelDraw& draw, double tau, double snr) noexcept;

/// (tau / (K+1)) log2(1 + (SNR / tau) aggregate); zero when tau is zero.
double capacity_from_aggregate(double aggregate, std::size_t k_relays, double tau, double snr) noexcept;

/// Instantaneous BAF capacity with K = draw.relay_count() relays.
double instantaneous_capacity(const ChannelDraw& draw, const SystemParams& params, double tau);

/// Outage threshold on the channel aggregate.
/// Exact: tau (2^{(K+1)R/tau} - 1) / SNR with resolved tau. For K = 1 under the
/// sqrt(R SNR) policy this is sqrt(R/SNR) (2^{2 sqrt(R/SNR)} - 1).
/// Linearized: (K+1) R / (log2(e) SNR).
double outage_threshold_g(const SystemParams& params, std::size_t k_relays, ThresholdMode mode);

LemmaConstant lemma1_constant(double sigma_u2, double sigma_v2, double sigma_w2);

/// One-relay epsilon-outage capacity without feedback.
double c_eps_baf_no_feedback(const LinkVariances& variances, double snr, double epsilon);

/// E(N) = 1 + Pr(source-only decoding fails), single relay.
double expected_n_one_relay(const LinkVariances& variances, const SystemParams& params,
                            ExpectedNMode mode = ExpectedNMode::Exact);

/// (2 / E(N)) times the no-feedback capacity.
double c_eps_baf_incremental(const LinkVariances& variances, const SystemParams& params,
                             ExpectedNMode mode = ExpectedNMode::Exact);
double c_eps_baf_incremental(const LinkVariances& variances, const SystemParams& params,
                             double expected_n);

/// Broadcast/multiple-access cut-set bound with incremental relaying,
/// K = variances.relay_count().
double c_eps_cutset(const LinkVariances& variances, double snr, double epsilon);

/// K-relay epsilon-outage capacity (upper bound) without feedback.
/// Reduces bit-for-bit to c_eps_baf_no_feedback for K = 1.
double c_eps_baf_k(const LinkVariances& variances, double snr, double epsilon);

/// ((K+1) / E_K(N)) c_eps_baf_k; throws if E_K(N) lies outside [1, K+1].
double c_eps_baf_ir_k(const LinkVariances& variances, double snr, double epsilon, double expected_n_k);

/// Upper bound (1 + K eps) / E_K(N) on the incremental-to-cut-set ratio.
double delta_ratio(double epsilon, double expected_n, std::size_t k_relays);

/// eps <= (E_K(N) - 1) / K.
FeasibilityCheck epsilon_feasibility(double epsilon, double expected_n, std::size_t k_relays);

/// Closed-form summary for one relay at params.rate.
CapacityReport capacity_report(const LinkVariances& variances, const SystemParams& params,
                               ExpectedNMode mode = ExpectedNMode::Exact);

/// Objective maximised by the relay position: 2 s_sd s_rd s_sr / (s_rd + s_sr)
/// with s_sd = 1, s_sr = d^-a, s_rd = (1-d)^-a.
double placement_objective(double position, double pathloss_exponent);

/// Grid of `points` interior positions (i+1)/(points+1); contains 0.5 for odd `points`.
std::vector<double> placement_grid(std::size_t points);

/// Argmax of placement_objective over placement_grid(grid_resolution).
double optimal_relay_position(double pathloss_exponent, std::size_t grid_resolution);

MinBoundResult min_bound_check(double x, double y, double delta);

} // namespace baf
