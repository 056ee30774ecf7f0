#pragma once

#include <cstdint>
#include <vector>

namespace psit {

// Uniform grid on [0, horizon] with K steps. Node K is pinned to the horizon
// so t_K == horizon even when horizon/K is not exactly representable.
struct TimeGrid {
    double horizon = 0.0;
    int steps = 0;
    double dt = 0.0;

    double node(int k) const { return k == steps ? horizon : k * dt; }
    bool same_as(const TimeGrid& other) const {
        return horizon == other.horizon && steps == other.steps;
    }
};

TimeGrid make_grid(double horizon, int steps);

// One realization on a grid. An index in jump_marks claims the whole
// increment values[k] - values[k-1] as the jump at k; unmarked increments
// count as continuous motion. jump_marks is kept sorted, unique, in 1..K.
struct SamplePath {
    TimeGrid grid;
    std::vector<double> values;
    std::vector<int> jump_marks;

    bool has_jump_at(int k) const;
};

struct PathEnsemble {
    TimeGrid grid;
    std::vector<SamplePath> paths;

    int n_paths() const { return static_cast<int>(paths.size()); }
};

SamplePath make_deterministic_path(const TimeGrid& grid,
                                   const std::vector<double>& values,
                                   const std::vector<int>& jump_marks = {});

// Counter-based randomness. Every draw is a pure function of
// (master_seed, stream labels, draw index), so paths are bit-identical
// regardless of evaluation order or thread count.
//
// Stream derivation rule (part of the external reproducibility contract):
//   key(seed, a, b, c) = mix(mix(mix(mix(seed ^ SALT) + a) + b) + c)
// with mix the splitmix64 finalizer and SALT a fixed per-purpose constant.
// The u64 at counter i is mix(key + (i+1) * 0x9E3779B97F4A7C15), and normal
// deviate i is Box-Muller applied to counters 2i and 2i+1.
struct RngSpec {
    std::uint64_t master_seed = 0;

    static std::uint64_t mix(std::uint64_t x);
    std::uint64_t stream_key(std::uint64_t salt, std::uint64_t a, std::uint64_t b,
                             std::uint64_t c) const;
};

struct CounterStream {
    std::uint64_t key = 0;

    std::uint64_t bits(std::uint64_t counter) const;
    double uniform01(std::uint64_t counter) const;  // in (0,1)
    double normal(std::uint64_t index) const;       // standard normal, index-addressed
};

// Fixed salts for the documented stream layout.
inline constexpr std::uint64_t kSaltBrownian = 0x42524F574E49414EULL;
inline constexpr std::uint64_t kSaltBridge = 0x4252494447452121ULL;
inline constexpr std::uint64_t kSaltDefault = 0x44464C5430303030ULL;
inline constexpr std::uint64_t kSaltFixture = 0x4649585455524553ULL;

// Stream for driver j of path p: key(seed, kSaltBrownian, j, p); normal i
// feeds the increment over (t_i, t_{i+1}].
CounterStream brownian_stream(const RngSpec& rng, int driver, int path);

PathEnsemble gen_brownian(const TimeGrid& grid, int n_paths, const RngSpec& rng);

// Lower-triangular Cholesky factor of a symmetric PSD matrix. Zero pivots are
// tolerated (degenerate correlation); a negative pivot throws
// std::invalid_argument naming the offending leading principal minor (1-based).
std::vector<std::vector<double>> cholesky_lower(const std::vector<std::vector<double>>& m);

// Correlated drivers: increments of driver i are sum_j L[i][j] * xi_j * sqrt(dt)
// with xi_j the independent per-driver normals from brownian_stream. rho must
// be symmetric with unit diagonal.
std::vector<PathEnsemble> gen_correlated_brownians(const TimeGrid& grid, int n_drivers,
                                                   const std::vector<std::vector<double>>& rho,
                                                   int n_paths, const RngSpec& rng);

// Brownian-bridge infill of an existing ensemble onto a grid with
// factor * K steps. Coarse nodes are carried over bitwise; interior points of
// coarse interval c are drawn from the stream key(seed, kSaltBridge, source K,
// path, c), so a realization refines consistently across resolutions.
PathEnsemble refine_brownian(const PathEnsemble& coarse, int factor, const RngSpec& rng);

}  // namespace psit
