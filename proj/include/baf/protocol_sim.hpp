#pragma once

#include "baf/channel_model.hpp"

#include <cstddef>
#include <vector>

namespace baf {

enum class RelayOrderPolicy {
    FixedIndex,     // relay 1, relay 2, ... as indexed
    BestRelayFirst  // descending aggregate contribution, ties by lower index
};

/// Result of one block of the incremental relaying protocol.
struct BlockOutcome {
    bool decoded = false;
    std::size_t sub_blocks_used = 0;       // N in [1, K+1]
    double final_aggregate = 0.0;          // accumulated aggregate after sub-block N
    std::vector<bool> feedback_trace;      // one bit per decode attempt, 1 = ACK
};

/// Compact outcome used by the Monte Carlo hot loop.
struct BlockSummary {
    bool decoded;
    std::size_t sub_blocks_used;
    double final_aggregate;
};

std::vector<std::size_t> relay_order(const ChannelDraw& draw, RelayOrderPolicy policy, double tau, double snr);

/// Runs the sub-block state machine: the source bursts first, then relays in
/// `policy` order, each adding its term to the accumulated aggregate. The
/// destination attempts to decode after every sub-block and feeds back one bit;
/// the first ACK ends the block, K+1 NACKs end it in outage.
BlockOutcome simulate_block(const ChannelDraw& draw, const SystemParams& params, double tau,
                            RelayOrderPolicy policy = RelayOrderPolicy::FixedIndex);

/// Same decision sequence as simulate_block without building the trace.
/// `order_scratch` is reused between calls under BestRelayFirst.
BlockSummary run_block(const ChannelDraw& draw, const SystemParams& params, double tau,
                       RelayOrderPolicy policy, std::vector<std::size_t>& order_scratch);

} // namespace baf
