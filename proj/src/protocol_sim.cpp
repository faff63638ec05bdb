#include "baf/protocol_sim.hpp"

#include "baf/analytic_capacity.hpp"
#include "baf/errors.hpp"

#include <algorithm>
#include <numeric>

namespace baf {

namespace {

struct DecodeRule {
    const SystemParams& params;
    std::size_t k;
    double tau;
    double linear_threshold;

    bool operator()(double aggregate) const noexcept
    {
        if (params.rate <= 0.0)
            return true;
        if (params.threshold_mode == ThresholdMode::Linearized)
            return aggregate >= linear_threshold;
        return capacity_from_aggregate(aggregate, k, tau, params.snr) >= params.rate;
    }
};

DecodeRule make_rule(const ChannelDraw& draw, const SystemParams& params, double tau)
{
    const std::size_t k = draw.relay_count();
    if (k == 0)
        throw InvalidParameter("incremental relaying needs at least one relay");
    if (params.rate > 0.0 && !(tau > 0.0 && tau <= 1.0))
        throw InvalidParameter("tau must lie in (0, 1]");
    double lin = 0.0;
    if (params.threshold_mode == ThresholdMode::Linearized)
        lin = outage_threshold_g(params, k, ThresholdMode::Linearized);
    return DecodeRule{params, k, tau, lin};
}

template <typename Order>
BlockSummary run_sequence(const ChannelDraw& draw, const SystemParams& params, const DecodeRule& rule,
                          double tau, Order&& relay_at)
{
    const std::size_t k = draw.relay_count();
    double aggregate = draw.g_sd;
    if (rule(aggregate))
        return {true, 1, aggregate};
    for (std::size_t step = 0; step < k; ++step) {
        const std::size_t r = relay_at(step);
        aggregate += relay_term(draw.g_sr[r], draw.g_rd[r], tau, params.snr);
        if (rule(aggregate))
            return {true, step + 2, aggregate};
    }
    return {false, k + 1, aggregate};
}

} // namespace

std::vector<std::size_t> relay_order(const ChannelDraw& draw, RelayOrderPolicy policy, double tau, double snr)
{
    std::vector<std::size_t> order(draw.relay_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (policy == RelayOrderPolicy::BestRelayFirst) {
        std::vector<double> terms(order.size());
        for (std::size_t k = 0; k < order.size(); ++k)
            terms[k] = relay_term(draw.g_sr[k], draw.g_rd[k], tau, snr);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return terms[a] > terms[b]; });
    }
    return order;
}

BlockSummary run_block(const ChannelDraw& draw, const SystemParams& params, double tau, RelayOrderPolicy policy,
                       std::vector<std::size_t>& order_scratch)
{
    const DecodeRule rule = make_rule(draw, params, tau);
    if (policy == RelayOrderPolicy::FixedIndex)
        return run_sequence(draw, params, rule, tau, [](std::size_t step) { return step; });
    order_scratch = relay_order(draw, policy, tau, params.snr);
    return run_sequence(draw, params, rule, tau, [&](std::size_t step) { return order_scratch[step]; });
}

BlockOutcome simulate_block(const ChannelDraw& draw, const SystemParams& params, double tau,
                            RelayOrderPolicy policy)
{
    std::vector<std::size_t> scratch;
    const BlockSummary s = run_block(draw, params, tau, policy, scratch);
    BlockOutcome out;
    out.decoded = s.decoded;
    out.sub_blocks_used = s.sub_blocks_used;
    out.final_aggregate = s.final_aggregate;
    out.feedback_trace.assign(s.sub_blocks_used, false);
    if (s.decoded)
        out.feedback_trace.back() = true;
    return out;
}

} // namespace baf
