#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace baf {

/// One source, K relays on the segment towards the destination, one destination.
/// Relay positions are measured from the source.
struct NetworkGeometry {
    double sd_distance = 1.0;
    std::vector<double> relay_positions;
    double pathloss_exponent = 3.0;

    void validate() const;
};

/// Mean squared channel magnitudes of every link.
struct LinkVariances {
    double sigma_sd2 = 1.0;
    std::vector<double> sigma_sr2;
    std::vector<double> sigma_rd2;

    [[nodiscard]] std::size_t relay_count() const noexcept { return sigma_sr2.size(); }
    void validate() const;

    /// Unit variances on every link for `k` relays.
    static LinkVariances unit(std::size_t k);
    /// Single-relay convenience constructor.
    static LinkVariances one_relay(double sd, double sr, double rd);
};

enum class TauPolicy { SqrtRSnr, Fixed };

/// Selects the exact decode/outage rule or its low-SNR linearization.
enum class ThresholdMode { Exact, Linearized };

struct SystemParams {
    double snr = 1.0;     // linear P/N0
    double rate = 0.01;   // bit/s/Hz
    double epsilon = 1e-3;
    std::size_t k_relays = 1;
    TauPolicy tau_policy = TauPolicy::SqrtRSnr;
    double tau_fixed = 1.0; // only read under TauPolicy::Fixed
    ThresholdMode threshold_mode = ThresholdMode::Exact;

    /// rate == 0 is accepted as the degenerate never-fails limit.
    void validate() const;
};

struct TauResolution {
    double value;
    bool clamped; // sqrt(R*SNR) exceeded 1, bursty regime not in effect
};

/// Squared channel magnitudes of one fading block.
struct ChannelDraw {
    double g_sd = 0.0;
    std::vector<double> g_sr;
    std::vector<double> g_rd;

    [[nodiscard]] std::size_t relay_count() const noexcept { return g_sr.size(); }
};

/// sigma^2 = distance^(-pathloss_exponent), proportionality constant 1.
LinkVariances variances_from_geometry(const NetworkGeometry& geom);

TauResolution resolve_tau(const SystemParams& params);

/// Counter-based random stream: the output sequence is a pure function of
/// (master_seed, trial_index). Satisfies UniformRandomBitGenerator.
class TrialStream {
public:
    using result_type = std::uint64_t;

    TrialStream(std::uint64_t master_seed, std::uint64_t trial_index) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform variate in (0, 1].
    double uniform_open0() noexcept;
    /// Exponential variate with the given mean.
    double exponential(double mean) noexcept;

private:
    std::uint64_t state_;
};

ChannelDraw draw_channels(const LinkVariances& variances, TrialStream& stream);

/// Allocation-free variant for hot loops; `out` is resized on first use.
void draw_channels_into(const LinkVariances& variances, TrialStream& stream, ChannelDraw& out);

} // namespace baf
