#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "psit/calculus.hpp"
#include "psit/fixtures.hpp"

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

const RngSpec kRng{7};

ProcessOnB one_path(const TimeGrid& g, const std::vector<double>& values,
                    const std::vector<int>& marks = {}) {
    Psit b = full_psit(g, 1);
    PathEnsemble e;
    e.grid = g;
    e.paths = {make_deterministic_path(g, values, marks)};
    return make_process(b, e);
}

bool same_values_on_b(const ProcessOnB& a, const ProcessOnB& b) {
    if (!a.psit.same_sections(b.psit)) return false;
    for (int p = 0; p < a.n_paths(); ++p)
        for (int k = 0; k <= a.psit.last_index(p); ++k)
            if (a.ens.paths[p].values[k] != b.ens.paths[p].values[k]) return false;
    return true;
}

double sup_on_b(const ProcessOnB& x) {
    double s = 0.0;
    for (int p = 0; p < x.n_paths(); ++p)
        for (int k = 0; k <= x.psit.last_index(p); ++k)
            s = std::max(s, std::abs(x.ens.paths[p].values[k]));
    return s;
}

// Indicator of [0, tau] (closed) or [0, tau) (left-open) as a process on B.
ProcessOnB indicator(const Psit& b, const StoppingTime& tau, bool closed) {
    PathEnsemble e;
    e.grid = b.grid;
    e.paths.resize(b.n_paths());
    for (int p = 0; p < b.n_paths(); ++p) {
        e.paths[p].grid = b.grid;
        e.paths[p].values.assign(b.grid.steps + 1, 0.0);
        int cut = closed ? tau.index[p] : tau.index[p] - 1;
        for (int k = 0; k <= std::min(cut, b.grid.steps); ++k)
            e.paths[p].values[k] = 1.0;
    }
    return make_process(b, e);
}

}  // namespace

TEST_CASE("left-endpoint integral on a hand-checked ramp") {
    TimeGrid g = make_grid(1.0, 4);
    ProcessOnB ramp = one_path(g, {0.0, 0.25, 0.5, 0.75, 1.0});
    IntegralResult r = ls_integral(ramp, ramp);
    CHECK(r.value.ens.paths[0].values ==
          std::vector<double>{0.0, 0.0, 0.0625, 0.1875, 0.375});

    // Index 0 carries H_0 * A_0.
    ProcessOnB h = one_path(g, {3.0, 3.0, 3.0, 3.0, 3.0});
    ProcessOnB a = one_path(g, {2.0, 2.0, 2.0, 2.0, 2.0});
    CHECK(ls_integral(h, a).value.ens.paths[0].values[0] == 6.0);

    Psit other = full_psit(make_grid(1.0, 4), 2);
    ProcessOnB two = fixture_process(other, kRng, 1);
    CHECK(throws_with([&] { ls_integral(ramp, two); }, "operands live on different sets"));
}

TEST_CASE("integrating against the constant 1 reproduces the integrator") {
    TimeGrid g = make_grid(1.0, 64);
    Psit b = fixture_psit(g, 8, kRng, 2);
    ProcessOnB x = fixture_process(b, kRng, 3);
    ProcessOnB one = map_values(x, [](double) { return 1.0; });
    IntegralResult r = ls_integral(one, x);
    CHECK(max_rel_diff_on_b(r.value, x) <= 1e-12);
}

TEST_CASE("integral is linear in both slots and composes associatively") {
    TimeGrid g = make_grid(1.0, 64);
    Psit b = fixture_psit(g, 6, kRng, 4);
    ProcessOnB h = fixture_process(b, kRng, 5);
    ProcessOnB gg = fixture_process(b, kRng, 6);
    ProcessOnB x = fixture_process(b, kRng, 7);
    ProcessOnB y = fixture_process(b, kRng, 8);

    ProcessOnB lhs = ls_integral(lin_comb(0.7, h, -1.3, gg), x).value;
    ProcessOnB rhs = lin_comb(0.7, ls_integral(h, x).value, -1.3, ls_integral(gg, x).value);
    CHECK(max_rel_diff_on_b(lhs, rhs) <= 1e-10);

    lhs = ls_integral(h, lin_comb(0.4, x, 1.7, y)).value;
    rhs = lin_comb(0.4, ls_integral(h, x).value, 1.7, ls_integral(h, y).value);
    CHECK(max_rel_diff_on_b(lhs, rhs) <= 1e-10);

    lhs = ls_integral(h, ls_integral(gg, x).value).value;
    rhs = ls_integral(pointwise_product(h, gg), x).value;
    CHECK(max_rel_diff_on_b(lhs, rhs) <= 1e-10);
}

TEST_CASE("jumps of an integral are the left limits of the integrand times the jumps") {
    TimeGrid g = make_grid(1.0, 64);
    Psit b = fixture_psit(g, 6, kRng, 10);
    ProcessOnB h = fixture_process(b, kRng, 11);
    ProcessOnB x = fixture_process(b, kRng, 12);
    ProcessOnB lhs = jumps(ls_integral(h, x).value);
    ProcessOnB rhs = pointwise_product(left_limits(h), jumps(x));
    CHECK(max_rel_diff_on_b(lhs, rhs) <= 1e-12);
}

TEST_CASE("stopping commutes with integration, exactly") {
    TimeGrid g = make_grid(1.0, 32);
    StoppingTime debut;
    debut.index = {kInfIndex, 5, 9, 16, 3, 7, 32, 4};
    Psit b = psit_from_debut(debut, {0, 1, 0, 1, 0, 1, 0, 0}, g);
    ProcessOnB h = fixture_process(b, kRng, 14);
    ProcessOnB x = fixture_process(b, kRng, 15);
    StoppingTime tau;
    tau.index.resize(8);
    for (int p = 0; p < 8; ++p) tau.index[p] = std::max(1, b.last_index(p) / 2);

    ProcessOnB ihx = ls_integral(h, x).value;
    PathEnsemble stopped = stop(ihx, tau);
    ProcessOnB xs = make_process(b, stop(x, tau));
    ProcessOnB hs = make_process(b, stop(h, tau));

    // H . (X^tau) and (H^tau) . (X^tau) both equal (H . X)^tau bitwise:
    // increments of X^tau vanish beyond tau, so the integrand there is moot.
    CHECK(same_values_on_b(make_process(b, stopped), ls_integral(h, xs).value));
    CHECK(same_values_on_b(make_process(b, stopped), ls_integral(hs, xs).value));

    // Cutting the integrand with the indicator of [0, tau) does the same:
    // under the left-endpoint rule the factor at j-1 gates the step to j.
    ProcessOnB cut = pointwise_product(h, indicator(b, tau, false));
    CHECK(same_values_on_b(make_process(b, stopped), ls_integral(cut, x).value));
}

TEST_CASE("plain summation is cut by the closed indicator") {
    TimeGrid g = make_grid(1.0, 16);
    Psit b = fixture_psit(g, 6, kRng, 16);
    ProcessOnB x = fixture_process(b, kRng, 17);
    StoppingTime tau;
    tau.index.resize(6);
    for (int p = 0; p < 6; ++p) tau.index[p] = b.last_index(p) / 2;

    ProcessOnB lhs = summation(pointwise_product(x, indicator(b, tau, true)));
    ProcessOnB rhs = make_process(b, stop(summation(x), tau));
    CHECK(same_values_on_b(lhs, rhs));
}

TEST_CASE("left limits lag by one step and jumps pick out marked increments") {
    TimeGrid g = make_grid(1.0, 3);
    ProcessOnB x = one_path(g, {5.0, 7.0, 7.0, 9.0}, {3});
    CHECK(left_limits(x).ens.paths[0].values == std::vector<double>{5.0, 5.0, 7.0, 7.0});
    ProcessOnB j = jumps(x);
    CHECK(j.ens.paths[0].values == std::vector<double>{0.0, 0.0, 0.0, 2.0});
    CHECK(j.ens.paths[0].jump_marks == std::vector<int>{3});
}

TEST_CASE("covariation splits into initial, continuous, and jump parts") {
    TimeGrid g = make_grid(1.0, 2);
    ProcessOnB x = one_path(g, {0.0, 1.0, 3.0}, {2});
    QuadraticDecomposition q = quad_covar(x, x);
    CHECK(q.total.ens.paths[0].values == std::vector<double>{0.0, 1.0, 5.0});
    CHECK(q.continuous.ens.paths[0].values == std::vector<double>{0.0, 1.0, 1.0});
    CHECK(q.jump_part.ens.paths[0].values == std::vector<double>{0.0, 0.0, 4.0});
    CHECK(q.initial[0] == 0.0);

    TimeGrid gf = make_grid(1.0, 48);
    Psit b = fixture_psit(gf, 6, kRng, 20);
    ProcessOnB fx = fixture_process(b, kRng, 21);
    ProcessOnB fy = fixture_process(b, kRng, 22);
    ProcessOnB fz = fixture_process(b, kRng, 23);

    // Symmetry is bitwise; the split recombines bitwise index by index.
    CHECK(same_values_on_b(quad_covar(fx, fy).total, quad_covar(fy, fx).total));
    QuadraticDecomposition qf = quad_covar(fx, fy);
    for (int p = 0; p < 6; ++p)
        for (int k = 0; k <= b.last_index(p); ++k)
            CHECK(qf.total.ens.paths[p].values[k] ==
                  qf.initial[p] + qf.continuous.ens.paths[p].values[k] +
                      qf.jump_part.ens.paths[p].values[k]);

    ProcessOnB lhs = quad_covar(lin_comb(2.0, fx, -0.5, fy), fz).total;
    ProcessOnB rhs = lin_comb(2.0, quad_covar(fx, fz).total, -0.5, quad_covar(fy, fz).total);
    CHECK(max_rel_diff_on_b(lhs, rhs) <= 1e-10);
}

TEST_CASE("change-of-variable residual vanishes for quadratics") {
    TimeGrid g = make_grid(1.0, 64);
    Psit b = fixture_psit(g, 8, kRng, 24);
    ProcessOnB x = fixture_process(b, kRng, 25);
    double scale = std::max(1.0, sup_on_b(x));

    ScalarC2 sq{[](double v) { return v * v; }, [](double v) { return 2 * v; },
                [](double) { return 2.0; }};
    CHECK(sup_on_b(ito_residual(sq, x)) <= 1e-12 * scale * scale);

    ScalarC2 lin{[](double v) { return 3 * v - 1; }, [](double) { return 3.0; },
                 [](double) { return 0.0; }};
    CHECK(sup_on_b(ito_residual(lin, x)) <= 1e-12 * scale);

    // A genuinely curved f leaves a third-order remainder: small but nonzero.
    ScalarC2 sine{[](double v) { return std::sin(v); }, [](double v) { return std::cos(v); },
                  [](double v) { return -std::sin(v); }};
    double r = sup_on_b(ito_residual(sine, x));
    CHECK(r > 0.0);
    CHECK(r < 0.5);
}

TEST_CASE("multivariate residual vanishes for second-degree polynomials") {
    TimeGrid g = make_grid(1.0, 64);
    Psit b = fixture_psit(g, 6, kRng, 26);
    std::vector<ProcessOnB> z = {fixture_process(b, kRng, 27), fixture_process(b, kRng, 28)};
    double scale = std::max({1.0, sup_on_b(z[0]), sup_on_b(z[1])});

    MultiC2 mixed{
        [](const std::vector<double>& v) { return v[0] * v[0] + v[0] * v[1]; },
        [](const std::vector<double>& v) {
            return std::vector<double>{2 * v[0] + v[1], v[0]};
        },
        [](const std::vector<double>&) {
            return std::vector<std::vector<double>>{{2.0, 1.0}, {1.0, 0.0}};
        }};
    CHECK(sup_on_b(ito_residual_multi(mixed, z)) <= 1e-12 * scale * scale);

    MultiC2 affine{[](const std::vector<double>& v) { return v[0] - 2 * v[1] + 4; },
                   [](const std::vector<double>&) {
                       return std::vector<double>{1.0, -2.0};
                   },
                   [](const std::vector<double>&) {
                       return std::vector<std::vector<double>>{{0.0, 0.0}, {0.0, 0.0}};
                   }};
    CHECK(sup_on_b(ito_residual_multi(affine, z)) <= 1e-12 * scale);
}

TEST_CASE("products decompose through integration by parts") {
    TimeGrid g = make_grid(1.0, 64);
    Psit b = fixture_psit(g, 8, kRng, 30);
    ProcessOnB x = fixture_process(b, kRng, 31);
    ProcessOnB y = fixture_process(b, kRng, 32);
    double scale = std::max(1.0, sup_on_b(x) * sup_on_b(y));
    CHECK(sup_on_b(ibp_residual(x, y)) <= 1e-12 * scale);
}

TEST_CASE("the segment decomposition reassembles to the integral") {
    TimeGrid g = make_grid(1.0, 32);
    Psit b = fixture_psit(g, 6, kRng, 33);
    ProcessOnB h = fixture_process(b, kRng, 34);
    ProcessOnB x = fixture_process(b, kRng, 35);

    IntegralResult ls = ls_integral(h, x);
    IntegralResult st = stoch_integral(h, x);
    CHECK(same_values_on_b(ls.value, st.value));
    REQUIRE_FALSE(st.segments.empty());
    CHECK(same_values_on_b(reassemble_segments(st.segments, b), st.value));

    CHECK(throws_with([&] { reassemble_segments({}, b); }, "no segments"));
    std::vector<IntegralSegment> cut(st.segments.begin(), st.segments.begin() + 1);
    bool covers = true;
    for (int p = 0; p < 6; ++p) {
        int t = cut[0].tau.index[p];
        if ((t == kInfIndex ? g.steps : t) < b.last_index(p)) covers = false;
    }
    if (!covers)
        CHECK(throws_with([&] { reassemble_segments(cut, b); }, "do not cover"));
}

TEST_CASE("gluing member-by-member integrals matches integrating the glued processes") {
    TimeGrid g = make_grid(1.0, 32);
    Psit b = fixture_psit(g, 6, kRng, 36);
    ProcessOnB h = fixture_process(b, kRng, 37);
    ProcessOnB x = fixture_process(b, kRng, 38);
    FundamentalSequence fs = canonical_fs(b);
    CoupledSequence h_cs = coupled_from_process(h, fs);
    CoupledSequence x_cs = coupled_from_process(x, fs);

    IntegralResult direct = ls_integral(h, x);
    IntegralResult glued = ls_integral_glued(h_cs, x_cs, b);
    CHECK(equal_on_b(direct.value, glued.value));

    CoupledSequence shifted = x_cs;
    for (auto& t : shifted.times)
        for (auto& i : t.index)
            if (i != kInfIndex && i > 0) --i;
    CHECK(throws_with([&] { ls_integral_glued(h_cs, shifted, b); }, "must share times"));
}

TEST_CASE("the exponential closed form solves the integral equation") {
    TimeGrid g = make_grid(1.0, 4);
    ProcessOnB z = one_path(g, {0.0, 0.25, 0.5, 0.75, 1.0});
    ProcessOnB s = stoch_exp(z, 1.0);
    // <Z>_1 = 4 * 0.25^2, so S_1 = exp(1 - 0.125).
    CHECK(s.ens.paths[0].values[4] == doctest::Approx(std::exp(0.875)).epsilon(1e-14));
    CHECK(s.ens.paths[0].values[0] == 1.0);

    CHECK(throws_with([&] { stoch_exp(one_path(g, {1.0, 1.0, 1.0, 1.0, 1.0}), 1.0); },
                      "must start at 0"));
    CHECK(throws_with([&] { stoch_exp(one_path(g, {0.0, 1.0, 1.0, 1.0, 1.0}, {1}), 1.0); },
                      "must be continuous"));
    CHECK(throws_with([&] { stoch_exp(z, 0.0); }, "s0 must be > 0"));

    TimeGrid gf = make_grid(1.0, 64);
    Psit b = fixture_psit(gf, 6, kRng, 40);
    ProcessOnB w = shift_by_initial(fixture_process(b, kRng, 41));
    ProcessOnB se = euler_exp(w, 2.0);
    for (int p = 0; p < 6; ++p) {
        CHECK(se.ens.paths[p].values[0] == 2.0);
        for (int k = 1; k <= b.last_index(p); ++k) {
            double dz = w.ens.paths[p].values[k] - w.ens.paths[p].values[k - 1];
            CHECK(se.ens.paths[p].values[k] == se.ens.paths[p].values[k - 1] * (1.0 + dz));
        }
    }
    // S - s0 - (S_-) . Z == 0; the kernel already reads S at the left
    // endpoint, so S itself is passed as the integrand.
    ProcessOnB integral = ls_integral(se, w).value;
    double scale = std::max(1.0, sup_on_b(se));
    for (int p = 0; p < 6; ++p)
        for (int k = 0; k <= b.last_index(p); ++k)
            CHECK(std::abs(se.ens.paths[p].values[k] - 2.0 -
                           integral.ens.paths[p].values[k]) <= 1e-12 * scale);
}
