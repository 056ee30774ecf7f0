#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <functional>
#include <string>

#include "psit/grid_paths.hpp"
#include "psit/stats.hpp"

using namespace psit;

namespace {

bool throws_with(const std::function<void()>& fn, const std::string& needle) {
    try {
        fn();
    } catch (const std::exception& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
}

}  // namespace

TEST_CASE("grid construction and node layout") {
    TimeGrid g = make_grid(1.0, 4);
    CHECK(g.dt == doctest::Approx(0.25));
    CHECK(g.node(0) == 0.0);
    CHECK(g.node(4) == 1.0);  // the last node is the horizon itself, not 4*dt
    CHECK(g.node(3) == doctest::Approx(0.75));
    CHECK(g.same_as(make_grid(1.0, 4)));
    CHECK_FALSE(g.same_as(make_grid(1.0, 5)));

    CHECK_THROWS_AS(make_grid(0.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(-1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1.0, 0), std::invalid_argument);
}

TEST_CASE("deterministic paths validate their annotations") {
    TimeGrid g = make_grid(1.0, 3);
    SamplePath p = make_deterministic_path(g, {0.0, 1.0, 3.0, 3.0}, {2});
    CHECK(p.has_jump_at(2));
    CHECK_FALSE(p.has_jump_at(1));

    CHECK_THROWS_AS(make_deterministic_path(g, {0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_deterministic_path(g, {0.0, 1.0, 2.0, 3.0}, {0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_deterministic_path(g, {0.0, 1.0, 2.0, 3.0}, {4}),
                    std::invalid_argument);

    // Unordered or repeated marks are normalized, not rejected.
    SamplePath q = make_deterministic_path(g, {0.0, 1.0, 2.0, 3.0}, {3, 2, 2});
    CHECK(q.jump_marks == std::vector<int>{2, 3});
}

TEST_CASE("counter streams are pure functions of their labels") {
    RngSpec rng{42};
    CounterStream a{rng.stream_key(kSaltBrownian, 1, 2, 3)};
    CounterStream b{rng.stream_key(kSaltBrownian, 1, 2, 3)};
    CounterStream c{rng.stream_key(kSaltBrownian, 1, 2, 4)};
    CHECK(a.bits(7) == b.bits(7));
    CHECK(a.bits(7) != c.bits(7));
    CHECK(a.normal(11) == b.normal(11));

    double u = a.uniform01(123456);
    CHECK(u > 0.0);
    CHECK(u < 1.0);

    RngSpec other{43};
    CHECK(CounterStream{other.stream_key(kSaltBrownian, 1, 2, 3)}.bits(7) != a.bits(7));
}

TEST_CASE("brownian ensembles start at zero and have the right scale") {
    TimeGrid g = make_grid(1.0, 64);
    const int n = 2000;
    PathEnsemble w = gen_brownian(g, n, RngSpec{42});
    REQUIRE(w.n_paths() == n);

    std::vector<double> terminal(n);
    for (int p = 0; p < n; ++p) {
        CHECK(w.paths[p].values[0] == 0.0);
        terminal[p] = w.paths[p].values[64];
    }
    MeanStdError m = mean_std_error(terminal);
    CHECK(std::abs(m.mean) < 4.0 * m.std_error + 1e-12);

    double var = 0.0;
    for (double t : terminal) var += (t - m.mean) * (t - m.mean);
    var /= n - 1;
    CHECK(std::abs(var - 1.0) < 0.1);
}

TEST_CASE("brownian generation is identical across thread budgets") {
    TimeGrid g = make_grid(1.0, 128);
    setenv("PSIT_THREADS", "1", 1);
    PathEnsemble a = gen_brownian(g, 64, RngSpec{7});
    setenv("PSIT_THREADS", "5", 1);
    PathEnsemble b = gen_brownian(g, 64, RngSpec{7});
    unsetenv("PSIT_THREADS");
    for (int p = 0; p < 64; ++p) CHECK(a.paths[p].values == b.paths[p].values);
}

TEST_CASE("cholesky factor handles degenerate and rejects indefinite input") {
    auto id = cholesky_lower({{1.0, 0.0}, {0.0, 1.0}});
    CHECK(id[0][0] == 1.0);
    CHECK(id[1][1] == 1.0);
    CHECK(id[1][0] == 0.0);

    auto l = cholesky_lower({{1.0, 0.5}, {0.5, 1.0}});
    CHECK(l[1][0] == doctest::Approx(0.5));
    CHECK(l[1][1] == doctest::Approx(std::sqrt(0.75)));

    // Perfect correlation is a rank-one matrix: allowed, second pivot zero.
    auto d = cholesky_lower({{1.0, 1.0}, {1.0, 1.0}});
    CHECK(d[1][0] == doctest::Approx(1.0));
    CHECK(d[1][1] == 0.0);

    CHECK(throws_with([] { cholesky_lower({{1.0, 1.5}, {1.5, 1.0}}); },
                      "leading principal minor 2"));
}

TEST_CASE("correlated drivers reduce to independent ones for identity rho") {
    TimeGrid g = make_grid(1.0, 32);
    RngSpec rng{42};
    std::vector<std::vector<double>> id = {{1.0, 0.0}, {0.0, 1.0}};
    auto drivers = gen_correlated_brownians(g, 2, id, 50, rng);
    PathEnsemble solo = gen_brownian(g, 50, rng);
    for (int p = 0; p < 50; ++p) CHECK(drivers[0].paths[p].values == solo.paths[p].values);
}

TEST_CASE("perfectly correlated drivers coincide, partial correlation measures out") {
    TimeGrid g = make_grid(1.0, 32);
    RngSpec rng{42};
    auto same = gen_correlated_brownians(g, 2, {{1.0, 1.0}, {1.0, 1.0}}, 40, rng);
    for (int p = 0; p < 40; ++p)
        for (int k = 0; k <= 32; ++k)
            CHECK(same[0].paths[p].values[k] == same[1].paths[p].values[k]);

    const int n = 2000;
    auto half = gen_correlated_brownians(g, 2, {{1.0, 0.5}, {0.5, 1.0}}, n, rng);
    double sxy = 0, sxx = 0, syy = 0;
    for (int p = 0; p < n; ++p) {
        const double x = half[0].paths[p].values[32];
        const double y = half[1].paths[p].values[32];
        sxy += x * y;
        sxx += x * x;
        syy += y * y;
    }
    const double corr = sxy / std::sqrt(sxx * syy);
    CHECK(corr > 0.45);
    CHECK(corr < 0.55);

    CHECK(throws_with([&] { gen_correlated_brownians(g, 2, {{1.0, 0.5}}, 4, rng); },
                      "rho"));
}

TEST_CASE("bridge refinement keeps coarse nodes bitwise and the right scale") {
    TimeGrid g = make_grid(1.0, 50);
    RngSpec rng{42};
    PathEnsemble coarse = gen_brownian(g, 300, rng);
    PathEnsemble fine = refine_brownian(coarse, 4, rng);
    REQUIRE(fine.grid.steps == 200);
    for (int p = 0; p < 300; ++p)
        for (int k = 0; k <= 50; ++k)
            CHECK(fine.paths[p].values[4 * k] == coarse.paths[p].values[k]);

    // Quadratic variation of the refined paths should still be ~ t.
    double qv = 0.0;
    for (int p = 0; p < 300; ++p) {
        double s = 0.0;
        for (int k = 1; k <= 200; ++k) {
            const double d = fine.paths[p].values[k] - fine.paths[p].values[k - 1];
            s += d * d;
        }
        qv += s;
    }
    qv /= 300;
    CHECK(qv == doctest::Approx(1.0).epsilon(0.1));

    CHECK_THROWS_AS(refine_brownian(coarse, 1, rng), std::invalid_argument);
    PathEnsemble marked = coarse;
    marked.paths[0].jump_marks.push_back(3);
    CHECK_THROWS_AS(refine_brownian(marked, 2, rng), std::invalid_argument);
}
