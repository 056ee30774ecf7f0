#include "psit/fixtures.hpp"

#include <algorithm>
#include <cstddef>

#include "psit/grid_paths.hpp"

namespace psit {

Psit fixture_psit(const TimeGrid& grid, int n_paths, const RngSpec& rng, std::uint64_t tag) {
    StoppingTime debut;
    std::vector<std::uint8_t> open;
    debut.index.resize(static_cast<std::size_t>(n_paths));
    open.resize(static_cast<std::size_t>(n_paths));
    for (int p = 0; p < n_paths; ++p) {
        CounterStream s{rng.stream_key(kSaltFixture, tag, static_cast<std::uint64_t>(p), 0)};
        const double u = s.uniform01(0);
        if (u < 0.25) {
            debut.index[p] = kInfIndex;
            open[p] = 0;
        } else {
            const int d = 1 + static_cast<int>(s.uniform01(1) * grid.steps);
            debut.index[p] = std::min(d, grid.steps);
            open[p] = s.uniform01(2) < 0.5 ? 1 : 0;
        }
    }
    return psit_from_debut(debut, open, grid);
}

ProcessOnB fixture_process(const Psit& set, const RngSpec& rng, std::uint64_t tag) {
    const TimeGrid& grid = set.grid;
    const int n = static_cast<int>(set.debut.size());
    PathEnsemble ens;
    ens.grid = grid;
    ens.paths.resize(static_cast<std::size_t>(n));
    const auto steps = static_cast<std::uint64_t>(grid.steps);
    for (int p = 0; p < n; ++p) {
        CounterStream s{rng.stream_key(kSaltFixture, tag, static_cast<std::uint64_t>(p), 1)};
        auto& sp = ens.paths[p];
        sp.grid = grid;
        sp.values.resize(static_cast<std::size_t>(grid.steps) + 1);
        const int last = set.last_index(p);
        sp.values[0] = s.normal(0);
        for (int k = 1; k <= last; ++k) {
            const auto ku = static_cast<std::uint64_t>(k);
            double inc = 0.3 * s.normal(ku);
            if (s.bits(steps + ku) % 8 == 0) {
                inc += s.normal(2 * steps + ku);
                sp.jump_marks.push_back(k);
            }
            sp.values[k] = sp.values[k - 1] + inc;
        }
        for (int k = last + 1; k <= grid.steps; ++k) sp.values[k] = sp.values[last];
    }
    return make_process(set, ens);
}

std::vector<StoppingTime> fixture_switch_times(const Psit& set, int count,
                                               const RngSpec& rng, std::uint64_t tag) {
    const int n = static_cast<int>(set.debut.size());
    std::vector<StoppingTime> times(static_cast<std::size_t>(count));
    for (auto& t : times) t.index.resize(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p) {
        CounterStream s{rng.stream_key(kSaltFixture, tag, static_cast<std::uint64_t>(p), 2)};
        const int last = set.last_index(p);
        std::vector<int> cuts(static_cast<std::size_t>(count));
        for (int m = 0; m + 1 < count; ++m)
            cuts[m] = std::min(static_cast<int>(s.uniform01(static_cast<std::uint64_t>(m)) *
                                                (last + 1)),
                               last);
        cuts[count - 1] = last;
        std::sort(cuts.begin(), cuts.end());
        for (int m = 0; m < count; ++m) times[m].index[p] = cuts[m];
    }
    return times;
}

CoupledSequence fixture_coupled(const ProcessOnB& x, const std::vector<StoppingTime>& times,
                                const RngSpec& rng, std::uint64_t tag) {
    CoupledSequence cs;
    cs.times = times;
    cs.members.reserve(times.size());
    for (const auto& t : times) cs.members.push_back(stop(x, t));
    const int steps = x.grid().steps;
    for (std::size_t m = 0; m < cs.members.size(); ++m) {
        for (int p = 0; p < x.n_paths(); ++p) {
            CounterStream s{rng.stream_key(kSaltFixture, tag + m, static_cast<std::uint64_t>(p), 3)};
            const int window = std::min(times[m].index[p], x.psit.last_index(p));
            auto& v = cs.members[m].paths[p].values;
            for (int k = window + 1; k <= steps; ++k)
                v[k] = 1e15 * (s.normal(static_cast<std::uint64_t>(k)) + 2.0);
        }
    }
    return cs;
}

}  // namespace psit
