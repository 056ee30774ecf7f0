#include "psit/finance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "psit/calculus.hpp"
#include "psit/parallel.hpp"
#include "psit/stats.hpp"

namespace psit {

namespace {

PathEnsemble blank(const TimeGrid& grid, int n_paths) {
    PathEnsemble ens;
    ens.grid = grid;
    ens.paths.resize(static_cast<std::size_t>(n_paths));
    for (auto& sp : ens.paths) {
        sp.grid = grid;
        sp.values.assign(static_cast<std::size_t>(grid.steps) + 1, 0.0);
    }
    return ens;
}

void check_driver_inputs(const std::vector<RegimeSpec>& regimes,
                         const std::vector<PathEnsemble>& drivers,
                         const std::vector<StoppingTime>& switch_times,
                         const Psit& set) {
    if (regimes.empty()) throw std::invalid_argument("switching driver needs at least one regime");
    if (drivers.size() < regimes.size())
        throw std::invalid_argument("switching driver needs one driver per regime");
    const int n = static_cast<int>(set.debut.size());
    for (const auto& d : drivers) {
        if (!d.grid.same_as(set.grid) || d.n_paths() != n)
            throw std::invalid_argument("driver ensemble does not match the set");
    }
    for (const auto& t : switch_times) {
        if (static_cast<int>(t.index.size()) != n)
            throw std::invalid_argument("switch time has the wrong number of paths");
    }
    for (std::size_t m = 0; m + 1 < switch_times.size(); ++m) {
        for (int p = 0; p < n; ++p) {
            if (switch_times[m].index[p] > switch_times[m + 1].index[p])
                throw std::invalid_argument("switch times are not increasing (pair " +
                                            std::to_string(m) + ", " + std::to_string(m + 1) +
                                            " on path " + std::to_string(p) + ")");
        }
    }
}

}  // namespace

SwitchingDriver switching_driver(const std::vector<RegimeSpec>& regimes,
                                 const std::vector<PathEnsemble>& drivers,
                                 const std::vector<StoppingTime>& switch_times,
                                 const Psit& set) {
    check_driver_inputs(regimes, drivers, switch_times, set);
    const int n = static_cast<int>(set.debut.size());
    const int steps = set.grid.steps;
    const int n_regimes = static_cast<int>(regimes.size());
    const int n_segments = static_cast<int>(switch_times.size());

    PathEnsemble z_ens = blank(set.grid, n);
    PathEnsemble w_ens = blank(set.grid, n);

    parallel_for(n, [&](int p) {
        auto& z = z_ens.paths[p].values;
        auto& w = w_ens.paths[p].values;
        const int last = set.last_index(p);
        int seg = 0;
        double cz = 0.0, cw = 0.0;
        z[0] = 0.0;
        w[0] = 0.0;
        for (int k = 1; k <= last; ++k) {
            while (seg < n_segments) {
                const int t = switch_times[seg].index[p];
                if (t == kInfIndex || k <= t) break;
                const int r = std::min(seg + 1, n_regimes - 1);
                const double y_t = regimes[r].drift * set.grid.node(t) +
                                   regimes[r].sigma * drivers[r].paths[p].values[t];
                cz = z[t] - y_t;
                cw = w[t] - drivers[r].paths[p].values[t];
                ++seg;
            }
            const int r = std::min(seg, n_regimes - 1);
            const double y_k = regimes[r].drift * set.grid.node(k) +
                               regimes[r].sigma * drivers[r].paths[p].values[k];
            if (seg == 0) {
                z[k] = y_k;
                w[k] = drivers[r].paths[p].values[k];
            } else {
                z[k] = y_k + cz;
                w[k] = drivers[r].paths[p].values[k] + cw;
            }
        }
        for (int k = last + 1; k <= steps; ++k) {
            z[k] = z[last];
            w[k] = w[last];
        }
    });

    return {make_process(set, z_ens), make_process(set, w_ens)};
}

std::pair<CoupledSequence, CoupledSequence>
switching_members(const std::vector<RegimeSpec>& regimes,
                  const std::vector<PathEnsemble>& drivers,
                  const std::vector<StoppingTime>& switch_times,
                  const Psit& set) {
    check_driver_inputs(regimes, drivers, switch_times, set);
    const int n = static_cast<int>(set.debut.size());
    const int steps = set.grid.steps;
    const int n_regimes = static_cast<int>(regimes.size());
    const int n_members = static_cast<int>(switch_times.size());
    if (n_members == 0) throw std::invalid_argument("switching members need switch times");

    CoupledSequence z_cs, w_cs;
    z_cs.times = switch_times;
    w_cs.times = switch_times;
    z_cs.members.assign(n_members, blank(set.grid, n));
    w_cs.members.assign(n_members, blank(set.grid, n));

    parallel_for(n, [&](int p) {
        for (int m = 0; m < n_members; ++m) {
            auto& z = z_cs.members[m].paths[p].values;
            auto& w = w_cs.members[m].paths[p].values;
            const int r = std::min(m, n_regimes - 1);
            if (m == 0) {
                for (int k = 0; k <= steps; ++k) {
                    z[k] = regimes[0].drift * set.grid.node(k) +
                           regimes[0].sigma * drivers[0].paths[p].values[k];
                    w[k] = drivers[0].paths[p].values[k];
                }
                continue;
            }
            const auto& zp = z_cs.members[m - 1].paths[p].values;
            const auto& wp = w_cs.members[m - 1].paths[p].values;
            const int t = switch_times[m - 1].index[p];
            if (t == kInfIndex || t >= steps) {
                z = zp;
                w = wp;
                continue;
            }
            const double y_t = regimes[r].drift * set.grid.node(t) +
                               regimes[r].sigma * drivers[r].paths[p].values[t];
            const double cz = zp[t] - y_t;
            const double cw = wp[t] - drivers[r].paths[p].values[t];
            for (int k = 0; k <= t; ++k) {
                z[k] = zp[k];
                w[k] = wp[k];
            }
            for (int k = t + 1; k <= steps; ++k) {
                z[k] = regimes[r].drift * set.grid.node(k) +
                       regimes[r].sigma * drivers[r].paths[p].values[k] + cz;
                w[k] = drivers[r].paths[p].values[k] + cw;
            }
        }
    });

    return {std::move(z_cs), std::move(w_cs)};
}

ProcessOnB price_process(const ProcessOnB& z, double s0) {
    if (!(s0 > 0.0)) throw std::invalid_argument("initial price must be positive");
    const int n = z.n_paths();
    for (int p = 0; p < n; ++p) {
        const auto& v = z.ens.paths[p].values;
        const int last = z.psit.last_index(p);
        for (int k = 1; k <= last; ++k) {
            const double inc = v[k] - v[k - 1];
            if (!(1.0 + inc > 0.0)) {
                char buf[160];
                std::snprintf(buf, sizeof buf,
                              "price positivity violated on path %d at index %d (increment %.17g)",
                              p, k, inc);
                throw std::runtime_error(buf);
            }
        }
    }
    return euler_exp(z, s0);
}

ProcessOnB wealth(const ProcessOnB& shares, const ProcessOnB& price, double x0) {
    if (!std::isfinite(x0)) throw std::invalid_argument("initial wealth must be finite");
    ProcessOnB gains = ls_integral(shares, price).value;
    for (auto& sp : gains.ens.paths)
        for (auto& v : sp.values) v += x0;
    return gains;
}

std::vector<std::uint8_t> check_admissible(const ProcessOnB& shares,
                                           const ProcessOnB& price, double bound) {
    if (!(bound >= 0.0)) throw std::invalid_argument("admissibility bound must be >= 0");
    const ProcessOnB gains = ls_integral(shares, price).value;
    const int n = gains.n_paths();
    std::vector<std::uint8_t> ok(static_cast<std::size_t>(n), 1);
    for (int p = 0; p < n; ++p) {
        const auto& v = gains.ens.paths[p].values;
        const int last = gains.psit.last_index(p);
        double lo = 0.0, scale = 1.0;
        for (int k = 0; k <= last; ++k) {
            lo = std::min(lo, v[k]);
            scale = std::max(scale, std::abs(v[k]));
        }
        ok[p] = lo >= -bound - 1e-12 * scale ? 1 : 0;
    }
    return ok;
}

StoppingTime sample_default_times(const MarketInputs& in) {
    StoppingTime tau;
    tau.index.assign(static_cast<std::size_t>(in.n_paths), kInfIndex);
    if (in.default_kind == DefaultKind::none) return tau;

    const double dt = in.grid.dt;
    const int steps = in.grid.steps;
    auto snap = [&](double t) {
        // Down to a grid index, kept >= 1 so the section retains the origin;
        // at or past the last node means no default inside the window.
        int idx = static_cast<int>(std::floor(t / dt + 1e-9));
        idx = std::max(idx, 1);
        return idx > steps ? kInfIndex : idx;
    };

    if (in.default_kind == DefaultKind::fixed) {
        if (!(in.default_value > 0.0) || !std::isfinite(in.default_value))
            throw std::invalid_argument("fixed default time must be positive and finite");
        const int idx = snap(in.default_value);
        std::fill(tau.index.begin(), tau.index.end(), idx);
        return tau;
    }

    if (!(in.default_rate > 0.0) || !std::isfinite(in.default_rate))
        throw std::invalid_argument("default intensity must be positive and finite");
    for (int p = 0; p < in.n_paths; ++p) {
        CounterStream s{in.rng.stream_key(kSaltDefault, 0, static_cast<std::uint64_t>(p), 0)};
        const double t = -std::log(s.uniform01(0)) / in.default_rate;
        tau.index[p] = snap(t);
    }
    return tau;
}

Market build_market(const MarketInputs& in) {
    if (in.n_paths < 1) throw std::invalid_argument("market needs at least one path");
    if (in.regimes.empty()) throw std::invalid_argument("market needs at least one regime");
    for (std::size_t i = 0; i < in.regimes.size(); ++i) {
        if (!(in.regimes[i].sigma > 0.0))
            throw std::invalid_argument("regime " + std::to_string(i) + " volatility must be positive");
        if (!std::isfinite(in.regimes[i].drift))
            throw std::invalid_argument("regime " + std::to_string(i) + " drift must be finite");
    }
    if (!(in.s0 > 0.0)) throw std::invalid_argument("initial price must be positive");

    Market m;
    m.s0 = in.s0;
    m.regimes = in.regimes;
    m.default_time = sample_default_times(in);

    DefaultHorizon dh = psit_default_horizon(in.terminal, m.default_time, in.grid);
    m.set = dh.psit;
    m.announcing = dh.announcing;
    m.switch_times = dh.announcing.taus;

    const int n_regimes = static_cast<int>(in.regimes.size());
    std::vector<std::vector<double>> rho = in.rho;
    if (rho.empty()) {
        rho.assign(n_regimes, std::vector<double>(n_regimes, 0.0));
        for (int i = 0; i < n_regimes; ++i) rho[i][i] = 1.0;
    }
    std::vector<PathEnsemble> drivers =
        gen_correlated_brownians(in.grid, n_regimes, rho, in.n_paths, in.rng);

    SwitchingDriver sd = switching_driver(in.regimes, drivers, m.switch_times, m.set);
    m.z = std::move(sd.z);
    m.w = std::move(sd.w);
    m.price = price_process(m.z, in.s0);
    return m;
}

Strategy merton_strategy(const Market& market, double x0, double c) {
    if (!(x0 > 0.0)) throw std::invalid_argument("initial wealth must be positive");
    if (!(c >= 0.0) || !std::isfinite(c))
        throw std::invalid_argument("strategy multiplier must be >= 0 and finite");
    for (std::size_t i = 1; i < market.regimes.size(); ++i) {
        if (market.regimes[i].drift != market.regimes[0].drift ||
            market.regimes[i].sigma != market.regimes[0].sigma)
            throw std::invalid_argument(
                "log-optimal strategy requires identical coefficients across regimes");
    }
    const double mu = market.regimes[0].drift;
    const double sigma = market.regimes[0].sigma;
    const Psit& set = market.set;
    const TimeGrid& grid = set.grid;
    const int n = static_cast<int>(set.debut.size());

    Strategy st;
    st.amount = make_process(set, blank(grid, n));
    st.shares = make_process(set, blank(grid, n));

    if (mu != 0.0 && c != 0.0) {
        const double frac = c * mu / (sigma * sigma);
        const double growth = frac * mu - 0.5 * frac * frac * sigma * sigma;
        const double vol = frac * sigma;
        parallel_for(n, [&](int p) {
            auto& amt = st.amount.ens.paths[p].values;
            auto& sh = st.shares.ens.paths[p].values;
            const auto& w = market.w.ens.paths[p].values;
            const auto& s = market.price.ens.paths[p].values;
            const int last = set.last_index(p);
            for (int k = 0; k <= last; ++k)
                amt[k] = frac * x0 * std::exp(growth * grid.node(k) + vol * w[k]);
            sh[0] = 0.0;
            for (int k = 1; k <= last; ++k) sh[k] = amt[k] / s[k];
            for (int k = last + 1; k <= grid.steps; ++k) {
                amt[k] = amt[last];
                sh[k] = sh[last];
            }
        });
    }

    st.wealth = wealth(st.shares, market.price, x0);
    return st;
}

Strategy log_optimal_strategy(const Market& market, double x0) {
    return merton_strategy(market, x0, 1.0);
}

UtilityEstimate expected_log_utility(const ProcessOnB& wealth) {
    const int n = wealth.n_paths();
    if (n == 0) throw std::invalid_argument("utility estimate needs at least one path");
    UtilityEstimate u;
    std::vector<double> logs;
    logs.reserve(static_cast<std::size_t>(n));
    std::vector<double> horizons(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p) {
        const auto& v = wealth.ens.paths[p].values;
        const int last = wealth.psit.last_index(p);
        horizons[p] = wealth.grid().node(last);
        double lo = v[0];
        for (int k = 1; k <= last; ++k) lo = std::min(lo, v[k]);
        if (lo > 0.0)
            logs.push_back(std::log(v[last]));
        else
            ++u.n_rejected;
    }
    u.n_valid = static_cast<int>(logs.size());
    u.mean_horizon_time = mean_std_error(horizons).mean;
    if (u.n_valid == 0) {
        u.estimate = std::numeric_limits<double>::quiet_NaN();
        u.std_error = std::numeric_limits<double>::quiet_NaN();
        return u;
    }
    const MeanStdError mse = mean_std_error(logs);
    u.estimate = mse.mean;
    u.std_error = mse.std_error;
    return u;
}

}  // namespace psit
