#include "psit/sets.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace psit {

StoppingTime constant_time(int idx, int n_paths) {
    StoppingTime t;
    t.index.assign(n_paths, idx);
    return t;
}

StoppingTime pathwise_min(const StoppingTime& a, const StoppingTime& b) {
    if (a.n_paths() != b.n_paths())
        throw std::invalid_argument("pathwise_min: path counts differ");
    StoppingTime t;
    t.index.resize(a.index.size());
    for (std::size_t p = 0; p < a.index.size(); ++p)
        t.index[p] = std::min(a.index[p], b.index[p]);
    return t;
}

bool Psit::subset_of(const Psit& other) const {
    if (n_paths() != other.n_paths() || !grid.same_as(other.grid)) return false;
    for (int p = 0; p < n_paths(); ++p)
        if (last_index(p) > other.last_index(p)) return false;
    return true;
}

bool Psit::same_sections(const Psit& other) const {
    return subset_of(other) && other.subset_of(*this);
}

Psit psit_from_fs(const FundamentalSequence& fs, const TimeGrid& grid) {
    if (fs.size() == 0)
        throw std::invalid_argument("psit_from_fs: empty sequence");
    const int n = fs.taus[0].n_paths();
    for (const auto& t : fs.taus)
        if (t.n_paths() != n)
            throw std::invalid_argument("psit_from_fs: inconsistent path counts");
    for (int m = 0; m + 1 < fs.size(); ++m)
        for (int p = 0; p < n; ++p)
            if (fs.taus[m + 1].index[p] < fs.taus[m].index[p])
                throw std::invalid_argument(
                    "psit_from_fs: sequence decreases between members " + std::to_string(m) +
                    " and " + std::to_string(m + 1) + " on path " + std::to_string(p));

    Psit b;
    b.grid = grid;
    b.debut.resize(n);
    b.closed.resize(n);
    for (int p = 0; p < n; ++p) {
        int v = fs.taus[fs.size() - 1].index[p];
        bool increased = false;
        for (int m = 0; m < fs.size(); ++m)
            if (fs.taus[m].index[p] < v) increased = true;
        if (v == kInfIndex || v >= grid.steps) {
            // the union already covers the whole grid; nothing lies beyond it
            b.debut[p] = v == kInfIndex ? kInfIndex : grid.steps;
            b.closed[p] = 1;
        } else if (increased) {
            // strictly approached v: reads as announcing v+1, open there
            b.debut[p] = v + 1;
            b.closed[p] = 0;
        } else {
            b.debut[p] = v;
            b.closed[p] = 1;
        }
        if (fs.taus[0].index[p] < 0)
            throw std::invalid_argument("psit_from_fs: negative index on path " +
                                        std::to_string(p));
    }
    return b;
}

Psit full_psit(const TimeGrid& grid, int n_paths) {
    Psit b;
    b.grid = grid;
    b.debut.assign(static_cast<std::size_t>(n_paths), kInfIndex);
    b.closed.assign(static_cast<std::size_t>(n_paths), 1);
    return b;
}

Psit psit_from_debut(const StoppingTime& debut, const std::vector<std::uint8_t>& open_flags,
                     const TimeGrid& grid) {
    const int n = debut.n_paths();
    if (static_cast<int>(open_flags.size()) != n)
        throw std::invalid_argument("psit_from_debut: flag count differs from path count");
    Psit b;
    b.grid = grid;
    b.debut.resize(n);
    b.closed.resize(n);
    for (int p = 0; p < n; ++p) {
        int d = debut.index[p];
        if (d < 0 || (d > grid.steps && d != kInfIndex))
            throw std::invalid_argument("psit_from_debut: debut out of range on path " +
                                        std::to_string(p));
        if (d == 0 && open_flags[p])
            throw std::invalid_argument(
                "psit_from_debut: empty section on path " + std::to_string(p) +
                " (debut 0 cannot be open)");
        b.debut[p] = d;
        b.closed[p] = open_flags[p] ? 0 : 1;
        if (d == kInfIndex) b.closed[p] = 1;
    }
    return b;
}

FundamentalSequence canonical_fs(const Psit& psit) {
    const int n = psit.n_paths();
    int terms = 1;
    while ((1 << terms) < psit.grid.steps && terms < 30) ++terms;
    ++terms;  // n* <= log2(K) + 1

    FundamentalSequence fs;
    fs.taus.assign(terms, StoppingTime{});
    for (auto& t : fs.taus) t.index.resize(n);
    for (int p = 0; p < n; ++p) {
        if (psit.closed[p]) {
            for (int m = 0; m < terms; ++m) fs.taus[m].index[p] = psit.debut[p];
        } else {
            const int d = psit.debut[p];
            for (int m = 0; m < terms; ++m) {
                double step = std::ceil(d * std::pow(2.0, -(m + 1)));
                int v = d - static_cast<int>(step);
                fs.taus[m].index[p] = std::max(0, v);
            }
        }
    }
    return fs;
}

int node_index(const TimeGrid& grid, double value) {
    double raw = value / grid.dt;
    int k = static_cast<int>(std::llround(raw));
    if (k < 0 || k > grid.steps || std::abs(raw - k) > 1e-9)
        throw std::invalid_argument("value " + std::to_string(value) + " is not a grid node");
    return k;
}

DefaultHorizon psit_default_horizon(double T_const, const StoppingTime& tau,
                                    const TimeGrid& grid) {
    const int n = tau.n_paths();
    const int T_idx = node_index(grid, T_const);
    for (int p = 0; p < n; ++p) {
        if (tau.index[p] == 0)
            throw std::invalid_argument(
                "psit_default_horizon: default at index 0 empties the section on path " +
                std::to_string(p));
        if (tau.index[p] < 0)
            throw std::invalid_argument("psit_default_horizon: negative tau on path " +
                                        std::to_string(p));
    }

    Psit b;
    b.grid = grid;
    b.debut.resize(n);
    b.closed.resize(n);
    Psit before_default;  // [0, tau), used only to derive the announcing sequence
    before_default.grid = grid;
    before_default.debut.resize(n);
    before_default.closed.resize(n);
    for (int p = 0; p < n; ++p) {
        int t = tau.index[p];
        if (t == kInfIndex || t > T_idx) {
            b.debut[p] = T_idx;
            b.closed[p] = 1;
        } else {
            b.debut[p] = t;
            b.closed[p] = 0;
        }
        if (t == kInfIndex || t > grid.steps) {
            before_default.debut[p] = kInfIndex;
            before_default.closed[p] = 1;
        } else {
            before_default.debut[p] = t;
            before_default.closed[p] = 0;
        }
    }

    DefaultHorizon out;
    out.psit = b;
    out.announcing = canonical_fs(before_default);
    for (auto& t : out.announcing.taus)
        for (int p = 0; p < n; ++p) t.index[p] = std::min(t.index[p], T_idx);
    return out;
}

}  // namespace psit
