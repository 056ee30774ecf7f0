#pragma once

#include "psit/calculus.hpp"
#include "psit/process.hpp"
#include "psit/sets.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace psit {

struct RegimeSpec {
    double drift = 0.0;
    double sigma = 1.0;
};

// Glued driver for a regime-switching market. Member n of the underlying
// coupled sequence lives on regime min(n, n_regimes - 1): once the regime list
// is exhausted the last regime persists while the switch times keep refining.
struct SwitchingDriver {
    ProcessOnB z;  // drift + volatility driver, z[0] = 0
    ProcessOnB w;  // glued standard Brownian motion, w[0] = 0
};

// Builds the glued driver directly, one segment at a time. Within segment n
// the value is y_n[k] + (z[t] - y_n[t]) where t is the segment's left switch
// index, so the result is bit-identical to gluing the stopped member
// sequence; see switching_members.
SwitchingDriver switching_driver(const std::vector<RegimeSpec>& regimes,
                                 const std::vector<PathEnsemble>& drivers,
                                 const std::vector<StoppingTime>& switch_times,
                                 const Psit& set);

// Full member sequences (z members, w members) for consistency checks.
// Member n + 1 copies member n on [0, T_n] and continues with regime
// min(n + 1, n_regimes - 1) shifted to match at T_n, so stopped members agree
// bitwise. Memory is members * paths * (steps + 1) doubles; intended for
// moderate ensembles.
std::pair<CoupledSequence, CoupledSequence>
switching_members(const std::vector<RegimeSpec>& regimes,
                  const std::vector<PathEnsemble>& drivers,
                  const std::vector<StoppingTime>& switch_times,
                  const Psit& set);

// Price S = s0 * prod(1 + dz) on the set. Throws std::runtime_error naming
// path and index if any factor 1 + dz is not strictly positive.
ProcessOnB price_process(const ProcessOnB& z, double s0);

// X = x0 + integral of shares against price. The shares process is taken as
// is; strategy constructors below zero the index-0 share themselves.
ProcessOnB wealth(const ProcessOnB& shares, const ProcessOnB& price, double x0);

// Per-path flag: cumulative gains stay >= -bound (within 1e-12 of the path's
// gain scale) over the whole section.
std::vector<std::uint8_t> check_admissible(const ProcessOnB& shares,
                                           const ProcessOnB& price,
                                           double bound);

enum class DefaultKind { none, fixed, exponential };

struct MarketInputs {
    TimeGrid grid;
    int n_paths = 0;
    RngSpec rng;
    double s0 = 1.0;
    double x0 = 1.0;
    std::vector<RegimeSpec> regimes;
    std::vector<std::vector<double>> rho;  // empty: independent drivers
    double terminal = 0.0;                 // must sit on a grid node
    DefaultKind default_kind = DefaultKind::none;
    double default_value = 0.0;  // fixed: default time
    double default_rate = 0.0;   // exponential: intensity
};

struct Market {
    Psit set;                      // [0, terminal] cut at the default time
    FundamentalSequence announcing;
    std::vector<StoppingTime> switch_times;
    ProcessOnB z;
    ProcessOnB w;
    ProcessOnB price;
    double s0 = 1.0;
    std::vector<RegimeSpec> regimes;
    StoppingTime default_time;  // kInfIndex where no default was sampled
};

// Samples default indices per MarketInputs (none / fixed / exponential).
// Sampled times are snapped down to a grid index and clamped to >= 1 so the
// section keeps at least the origin; times at or beyond the last node are
// reported as kInfIndex.
StoppingTime sample_default_times(const MarketInputs& in);

Market build_market(const MarketInputs& in);

struct Strategy {
    ProcessOnB amount;  // currency invested in the asset
    ProcessOnB shares;  // amount / price, zero at index 0
    ProcessOnB wealth;
};

// Merton family: invest the fraction c * drift / sigma^2 of current wealth.
// The amount follows the closed-form wealth of that fraction; shares are
// amount / price with the index-0 share set to zero, so the realised wealth
// misses the first increment (one-step effect, documented in the README).
// Requires identical coefficients across regimes and x0 > 0. c = 1 is the
// log-optimal strategy; drift = 0 or c = 0 keeps everything in cash.
Strategy merton_strategy(const Market& market, double x0, double c);

Strategy log_optimal_strategy(const Market& market, double x0);

struct UtilityEstimate {
    double estimate = 0.0;   // mean of log wealth at the per-path horizon
    double std_error = 0.0;
    int n_valid = 0;
    int n_rejected = 0;      // paths whose wealth was not strictly positive
    double mean_horizon_time = 0.0;  // mean last-node time over all paths
};

UtilityEstimate expected_log_utility(const ProcessOnB& wealth);

}  // namespace psit
