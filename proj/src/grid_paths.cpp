#include "psit/grid_paths.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "psit/parallel.hpp"

namespace psit {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

void validate_jump_marks(std::vector<int>& marks, int steps) {
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    if (!marks.empty() && (marks.front() < 1 || marks.back() > steps))
        throw std::invalid_argument("jump_marks must lie in 1.." + std::to_string(steps));
}
}  // namespace

TimeGrid make_grid(double horizon, int steps) {
    if (!(horizon > 0.0))
        throw std::invalid_argument("make_grid: horizon must be > 0");
    if (steps < 1)
        throw std::invalid_argument("make_grid: steps must be >= 1");
    TimeGrid g;
    g.horizon = horizon;
    g.steps = steps;
    g.dt = horizon / steps;
    return g;
}

bool SamplePath::has_jump_at(int k) const {
    return std::binary_search(jump_marks.begin(), jump_marks.end(), k);
}

SamplePath make_deterministic_path(const TimeGrid& grid, const std::vector<double>& values,
                                   const std::vector<int>& jump_marks) {
    if (static_cast<int>(values.size()) != grid.steps + 1)
        throw std::invalid_argument("make_deterministic_path: expected " +
                                    std::to_string(grid.steps + 1) + " values, got " +
                                    std::to_string(values.size()));
    SamplePath p;
    p.grid = grid;
    p.values = values;
    p.jump_marks = jump_marks;
    validate_jump_marks(p.jump_marks, grid.steps);
    return p;
}

std::uint64_t RngSpec::mix(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1F4EE2B5ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

std::uint64_t RngSpec::stream_key(std::uint64_t salt, std::uint64_t a, std::uint64_t b,
                                  std::uint64_t c) const {
    std::uint64_t k = mix(master_seed ^ salt);
    k = mix(k + a);
    k = mix(k + b);
    k = mix(k + c);
    return k;
}

std::uint64_t CounterStream::bits(std::uint64_t counter) const {
    return RngSpec::mix(key + (counter + 1) * kGolden);
}

double CounterStream::uniform01(std::uint64_t counter) const {
    // 53 mantissa bits, shifted into the open interval
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterStream::normal(std::uint64_t index) const {
    double u1 = uniform01(2 * index);
    double u2 = uniform01(2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

CounterStream brownian_stream(const RngSpec& rng, int driver, int path) {
    return CounterStream{rng.stream_key(kSaltBrownian, static_cast<std::uint64_t>(driver),
                                        static_cast<std::uint64_t>(path), 0)};
}

PathEnsemble gen_brownian(const TimeGrid& grid, int n_paths, const RngSpec& rng) {
    if (n_paths < 1)
        throw std::invalid_argument("gen_brownian: n_paths must be >= 1");
    PathEnsemble ens;
    ens.grid = grid;
    ens.paths.resize(n_paths);
    double sdt = std::sqrt(grid.dt);
    parallel_for(n_paths, [&](int p) {
        CounterStream s = brownian_stream(rng, 0, p);
        SamplePath& path = ens.paths[p];
        path.grid = grid;
        path.values.resize(grid.steps + 1);
        path.values[0] = 0.0;
        for (int k = 1; k <= grid.steps; ++k)
            path.values[k] = path.values[k - 1] + sdt * s.normal(k - 1);
    });
    return ens;
}

std::vector<std::vector<double>> cholesky_lower(const std::vector<std::vector<double>>& m) {
    const std::size_t n = m.size();
    const double tol = 1e-12;
    for (const auto& row : m)
        if (row.size() != n) throw std::invalid_argument("cholesky_lower: matrix not square");
    std::vector<std::vector<double>> L(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        double d = m[j][j];
        for (std::size_t k = 0; k < j; ++k) d -= L[j][k] * L[j][k];
        if (d < -tol)
            throw std::invalid_argument(
                "cholesky_lower: leading principal minor " + std::to_string(j + 1) +
                " is not positive semi-definite");
        if (d <= tol) {
            // degenerate direction: the whole column must vanish for PSD
            L[j][j] = 0.0;
            for (std::size_t i = j + 1; i < n; ++i) {
                double num = m[i][j];
                for (std::size_t k = 0; k < j; ++k) num -= L[i][k] * L[j][k];
                if (std::abs(num) > 1e-9)
                    throw std::invalid_argument(
                        "cholesky_lower: leading principal minor " + std::to_string(j + 1) +
                        " is not positive semi-definite");
                L[i][j] = 0.0;
            }
            continue;
        }
        L[j][j] = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double num = m[i][j];
            for (std::size_t k = 0; k < j; ++k) num -= L[i][k] * L[j][k];
            L[i][j] = num / L[j][j];
        }
    }
    return L;
}

std::vector<PathEnsemble> gen_correlated_brownians(const TimeGrid& grid, int n_drivers,
                                                   const std::vector<std::vector<double>>& rho,
                                                   int n_paths, const RngSpec& rng) {
    if (n_drivers < 1)
        throw std::invalid_argument("gen_correlated_brownians: n_drivers must be >= 1");
    if (n_paths < 1)
        throw std::invalid_argument("gen_correlated_brownians: n_paths must be >= 1");
    if (static_cast<int>(rho.size()) != n_drivers)
        throw std::invalid_argument("gen_correlated_brownians: rho must be n_drivers x n_drivers");
    for (int i = 0; i < n_drivers; ++i) {
        if (static_cast<int>(rho[i].size()) != n_drivers)
            throw std::invalid_argument(
                "gen_correlated_brownians: rho must be n_drivers x n_drivers");
        if (std::abs(rho[i][i] - 1.0) > 1e-12)
            throw std::invalid_argument("gen_correlated_brownians: rho diagonal must be 1");
        for (int j = 0; j < i; ++j)
            if (rho[i][j] != rho[j][i])
                throw std::invalid_argument("gen_correlated_brownians: rho must be symmetric");
    }
    auto L = cholesky_lower(rho);

    std::vector<PathEnsemble> out(n_drivers);
    for (int d = 0; d < n_drivers; ++d) {
        out[d].grid = grid;
        out[d].paths.resize(n_paths);
    }
    double sdt = std::sqrt(grid.dt);
    parallel_for(n_paths, [&](int p) {
        std::vector<CounterStream> streams;
        streams.reserve(n_drivers);
        for (int d = 0; d < n_drivers; ++d) streams.push_back(brownian_stream(rng, d, p));
        for (int d = 0; d < n_drivers; ++d) {
            SamplePath& path = out[d].paths[p];
            path.grid = grid;
            path.values.assign(grid.steps + 1, 0.0);
        }
        std::vector<double> xi(n_drivers);
        for (int k = 1; k <= grid.steps; ++k) {
            for (int d = 0; d < n_drivers; ++d) xi[d] = streams[d].normal(k - 1);
            for (int d = 0; d < n_drivers; ++d) {
                double inc = 0.0;
                for (int j = 0; j <= d; ++j) inc += L[d][j] * xi[j];
                out[d].paths[p].values[k] = out[d].paths[p].values[k - 1] + sdt * inc;
            }
        }
    });
    return out;
}

PathEnsemble refine_brownian(const PathEnsemble& coarse, int factor, const RngSpec& rng) {
    if (factor < 2)
        throw std::invalid_argument("refine_brownian: factor must be >= 2");
    const TimeGrid& cg = coarse.grid;
    TimeGrid fg = make_grid(cg.horizon, cg.steps * factor);
    for (const auto& p : coarse.paths)
        if (!p.jump_marks.empty())
            throw std::invalid_argument("refine_brownian: input must have no jump marks");

    PathEnsemble fine;
    fine.grid = fg;
    fine.paths.resize(coarse.n_paths());
    parallel_for(coarse.n_paths(), [&](int p) {
        SamplePath& fp = fine.paths[p];
        fp.grid = fg;
        fp.values.resize(fg.steps + 1);
        const std::vector<double>& cv = coarse.paths[p].values;
        for (int c = 0; c < cg.steps; ++c) {
            CounterStream s{rng.stream_key(kSaltBridge, static_cast<std::uint64_t>(cg.steps),
                                           static_cast<std::uint64_t>(p),
                                           static_cast<std::uint64_t>(c))};
            double right = cv[c + 1];
            double x = cv[c];
            fp.values[c * factor] = x;
            // sequential conditional sampling toward the fixed right endpoint
            for (int m = 1; m < factor; ++m) {
                int remaining = factor - (m - 1);
                double mean = x + (right - x) / remaining;
                double var = fg.dt * static_cast<double>(remaining - 1) / remaining;
                x = mean + std::sqrt(var) * s.normal(m - 1);
                fp.values[c * factor + m] = x;
            }
        }
        fp.values[fg.steps] = cv[cg.steps];
    });
    return fine;
}

}  // namespace psit
