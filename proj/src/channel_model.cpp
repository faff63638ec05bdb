#include "baf/channel_model.hpp"

#include "baf/errors.hpp"

#include <cmath>
#include <string>

namespace baf {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

} // namespace

void NetworkGeometry::validate() const
{
    if (!positive_finite(sd_distance))
        throw InvalidParameter("sd_distance must be positive");
    if (!(pathloss_exponent >= 0.0) || !std::isfinite(pathloss_exponent))
        throw InvalidParameter("pathloss exponent must be finite and non-negative");
    for (double d : relay_positions) {
        if (!(d > 0.0 && d < sd_distance))
            throw InvalidParameter("relay position " + std::to_string(d) +
                                   " must lie strictly between source and destination");
    }
}

void LinkVariances::validate() const
{
    if (sigma_sr2.size() != sigma_rd2.size())
        throw InvalidParameter("sigma_sr2 and sigma_rd2 must have one entry per relay");
    if (!positive_finite(sigma_sd2))
        throw InvalidParameter("sigma_sd2 must be positive and finite");
    for (std::size_t k = 0; k < sigma_sr2.size(); ++k) {
        if (!positive_finite(sigma_sr2[k]) || !positive_finite(sigma_rd2[k]))
            throw InvalidParameter("relay " + std::to_string(k) + " variance must be positive and finite");
    }
}

LinkVariances LinkVariances::unit(std::size_t k)
{
    return LinkVariances{1.0, std::vector<double>(k, 1.0), std::vector<double>(k, 1.0)};
}

LinkVariances LinkVariances::one_relay(double sd, double sr, double rd)
{
    return LinkVariances{sd, {sr}, {rd}};
}

void SystemParams::validate() const
{
    if (!positive_finite(snr))
        throw InvalidParameter("snr must be positive");
    if (!(rate >= 0.0) || !std::isfinite(rate))
        throw InvalidParameter("rate must be non-negative");
    if (!(epsilon >= 0.0 && epsilon < 1.0))
        throw InvalidParameter("epsilon must lie in [0, 1)");
    if (tau_policy == TauPolicy::Fixed && !(tau_fixed > 0.0 && tau_fixed <= 1.0))
        throw InvalidParameter("fixed tau must lie in (0, 1]");
}

LinkVariances variances_from_geometry(const NetworkGeometry& geom)
{
    geom.validate();
    const double a = geom.pathloss_exponent;
    LinkVariances out;
    out.sigma_sd2 = std::pow(geom.sd_distance, -a);
    out.sigma_sr2.reserve(geom.relay_positions.size());
    out.sigma_rd2.reserve(geom.relay_positions.size());
    for (double d : geom.relay_positions) {
        out.sigma_sr2.push_back(std::pow(d, -a));
        out.sigma_rd2.push_back(std::pow(geom.sd_distance - d, -a));
    }
    out.validate();
    return out;
}

TauResolution resolve_tau(const SystemParams& params)
{
    if (params.tau_policy == TauPolicy::Fixed) {
        if (!(params.tau_fixed > 0.0 && params.tau_fixed <= 1.0))
            throw InvalidParameter("fixed tau must lie in (0, 1]");
        return {params.tau_fixed, false};
    }
    const double t = std::sqrt(params.rate * params.snr);
    if (t > 1.0)
        return {1.0, true};
    return {t, false};
}

TrialStream::TrialStream(std::uint64_t master_seed, std::uint64_t trial_index) noexcept
    : state_(mix64(master_seed + kGolden) ^ mix64(trial_index * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL))
{
}

TrialStream::result_type TrialStream::operator()() noexcept
{
    state_ += kGolden;
    return mix64(state_);
}

double TrialStream::uniform_open0() noexcept
{
    // 53 random mantissa bits mapped onto (0, 1]
    return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
}

double TrialStream::exponential(double mean) noexcept
{
    return -mean * std::log(uniform_open0());
}

void draw_channels_into(const LinkVariances& variances, TrialStream& stream, ChannelDraw& out)
{
    const std::size_t k = variances.relay_count();
    out.g_sr.resize(k);
    out.g_rd.resize(k);
    out.g_sd = stream.exponential(variances.sigma_sd2);
    for (std::size_t i = 0; i < k; ++i) {
        out.g_sr[i] = stream.exponential(variances.sigma_sr2[i]);
        out.g_rd[i] = stream.exponential(variances.sigma_rd2[i]);
    }
}

ChannelDraw draw_channels(const LinkVariances& variances, TrialStream& stream)
{
    ChannelDraw out;
    draw_channels_into(variances, stream, out);
    return out;
}

} // namespace baf
