#pragma once

#include <limits>
#include <vector>

#include "psit/grid_paths.hpp"

namespace psit {

// Sentinel for "beyond the grid end", the discrete stand-in for +infinity.
inline constexpr int kInfIndex = std::numeric_limits<int>::max();

// Per-path grid index at which a rule fires.
struct StoppingTime {
    std::vector<int> index;

    int n_paths() const { return static_cast<int>(index.size()); }
};

StoppingTime constant_time(int idx, int n_paths);
StoppingTime pathwise_min(const StoppingTime& a, const StoppingTime& b);

// Predictable set of interval type, stored as debut + closed flag per path.
// The section of path p is [0, debut] when closed and [0, debut) when open;
// debut == kInfIndex means the section covers the whole grid. A section is
// never empty, so debut == 0 forces closed.
struct Psit {
    TimeGrid grid;
    std::vector<int> debut;
    std::vector<std::uint8_t> closed;

    int n_paths() const { return static_cast<int>(debut.size()); }

    // Largest grid index inside the section of path p.
    int last_index(int p) const {
        if (debut[p] == kInfIndex) return grid.steps;
        return closed[p] ? debut[p] : debut[p] - 1;
    }
    bool contains(int p, int k) const { return k >= 0 && k <= last_index(p); }
    // Set inclusion of sections; representation-independent.
    bool subset_of(const Psit& other) const;
    bool same_sections(const Psit& other) const;
};

struct FundamentalSequence {
    std::vector<StoppingTime> taus;

    int size() const { return static_cast<int>(taus.size()); }
};

// Whole-grid section on every path.
Psit full_psit(const TimeGrid& grid, int n_paths);

// Union of [0, tau_n] read off a finite increasing list. A list that is
// constant throughout encodes a closed section; a list that strictly
// increased before stabilizing at v encodes the announcement of v+1, giving
// a section open at v+1 (the two encodings denote the same grid set).
Psit psit_from_fs(const FundamentalSequence& fs, const TimeGrid& grid);

// Debut + open/closed flags directly. F_flags[p] = true opens the section at
// the debut; debut 0 with an open flag would make the section empty and is
// rejected, naming the path.
Psit psit_from_debut(const StoppingTime& debut, const std::vector<std::uint8_t>& open_flags,
                     const TimeGrid& grid);

// Canonical exhaustion: tau_n = d on closed paths, d - ceil(d * 2^-n) on open
// paths (monotone, reaches d-1 within log2(K)+1 terms).
FundamentalSequence canonical_fs(const Psit& psit);

// The trading horizon [0, T] cut by a default time: section
// [0, index(T_const)] intersect [0, tau). Returns the set together with the
// announcing sequence T_n = tau_n ^ T used to glue regime drivers.
struct DefaultHorizon {
    Psit psit;
    FundamentalSequence announcing;
};

DefaultHorizon psit_default_horizon(double T_const, const StoppingTime& tau,
                                    const TimeGrid& grid);

// Grid index of a node value; throws if value is not a node.
int node_index(const TimeGrid& grid, double value);

}  // namespace psit
