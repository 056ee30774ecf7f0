#pragma once

#include <cstdint>
#include <vector>

#include "psit/process.hpp"
#include "psit/sets.hpp"

namespace psit {

// Deterministic randomized fixtures for tests and the verification suite.
// Everything is a pure function of (rng, tag), so fixtures are identical
// across runs, platforms, and thread counts.

// Section layout mixing full-grid paths with closed and open sections whose
// debuts are spread over the grid.
Psit fixture_psit(const TimeGrid& grid, int n_paths, const RngSpec& rng, std::uint64_t tag);

// Rough annotated process on the section: normal increments plus occasional
// marked jumps, frozen beyond the section.
ProcessOnB fixture_process(const Psit& set, const RngSpec& rng, std::uint64_t tag);

// Increasing stopping times on the section; the last one sits at the section
// end so coupled sequences built from them cover it.
std::vector<StoppingTime> fixture_switch_times(const Psit& set, int count,
                                               const RngSpec& rng, std::uint64_t tag);

// Coupled sequence (stop(x, T_m))_m with member m overwritten by large
// garbage strictly beyond min(T_m, last section index). Gluing must ignore
// the garbage entirely.
CoupledSequence fixture_coupled(const ProcessOnB& x, const std::vector<StoppingTime>& times,
                                const RngSpec& rng, std::uint64_t tag);

}  // namespace psit
