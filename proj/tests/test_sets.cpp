#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <string>

#include "psit/sets.hpp"

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

Psit section(const TimeGrid& g, int debut, bool open) {
    StoppingTime d;
    d.index = {debut};
    return psit_from_debut(d, {static_cast<std::uint8_t>(open ? 1 : 0)}, g);
}

}  // namespace

TEST_CASE("stopping time helpers") {
    StoppingTime a = constant_time(3, 4);
    CHECK(a.index == std::vector<int>{3, 3, 3, 3});
    StoppingTime b;
    b.index = {1, 5, 2, kInfIndex};
    StoppingTime m = pathwise_min(a, b);
    CHECK(m.index == std::vector<int>{1, 3, 2, 3});
}

TEST_CASE("sections from debuts: bounds, emptiness, closure") {
    TimeGrid g = make_grid(1.0, 8);

    Psit closed = section(g, 5, false);
    CHECK(closed.last_index(0) == 5);
    CHECK(closed.contains(0, 5));
    CHECK_FALSE(closed.contains(0, 6));

    Psit open = section(g, 5, true);
    CHECK(open.last_index(0) == 4);

    Psit full = section(g, kInfIndex, false);
    CHECK(full.last_index(0) == 8);

    CHECK(throws_with([&] { section(g, 0, true); }, "path 0"));
    CHECK_THROWS_AS(section(g, 9, false), std::invalid_argument);
    CHECK_NOTHROW(section(g, 0, false));  // the singleton {0} is a valid section
}

TEST_CASE("the two encodings of the same set compare equal") {
    TimeGrid g = make_grid(1.0, 8);
    // [0, 5) and [0, 4] are the same grid set.
    CHECK(section(g, 5, true).same_sections(section(g, 4, false)));
    CHECK_FALSE(section(g, 5, true).same_sections(section(g, 5, false)));
    CHECK(section(g, kInfIndex, false).same_sections(section(g, 8, false)));

    CHECK(section(g, 4, false).subset_of(section(g, 5, false)));
    CHECK(section(g, 5, true).subset_of(section(g, 4, false)));
    CHECK_FALSE(section(g, 5, false).subset_of(section(g, 5, true)));

    Psit f = full_psit(g, 3);
    CHECK(f.n_paths() == 3);
    CHECK(f.last_index(2) == 8);
}

TEST_CASE("canonical exhaustion of an open section announces its debut") {
    TimeGrid g = make_grid(1.0, 8);
    FundamentalSequence fs = canonical_fs(section(g, 8, true));
    REQUIRE(fs.size() == 4);  // smallest l with 2^l >= 8, plus one
    CHECK(fs.taus[0].index[0] == 4);
    CHECK(fs.taus[1].index[0] == 6);
    CHECK(fs.taus[2].index[0] == 7);
    CHECK(fs.taus[3].index[0] == 7);

    FundamentalSequence closed = canonical_fs(section(g, 5, false));
    for (const auto& t : closed.taus) CHECK(t.index[0] == 5);

    // Debut 1 open: the only usable index is 0 on every level.
    FundamentalSequence tiny = canonical_fs(section(g, 1, true));
    for (const auto& t : tiny.taus) CHECK(t.index[0] == 0);
}

TEST_CASE("sections can be read back from stopping-time lists") {
    TimeGrid g = make_grid(1.0, 8);

    // A list that kept increasing before stabilizing announces its limit:
    // the union is [0,3] but the encoding is the open interval at 4.
    FundamentalSequence approached;
    approached.taus = {constant_time(2, 1), constant_time(3, 1), constant_time(3, 1)};
    Psit a = psit_from_fs(approached, g);
    CHECK(a.debut[0] == 4);
    CHECK_FALSE(a.closed[0]);
    CHECK(a.same_sections(section(g, 3, false)));

    FundamentalSequence constant;
    constant.taus = {constant_time(3, 1), constant_time(3, 1)};
    Psit c = psit_from_fs(constant, g);
    CHECK(c.debut[0] == 3);
    CHECK(c.closed[0]);

    FundamentalSequence past_end;
    past_end.taus = {constant_time(5, 1), constant_time(9, 1)};
    Psit f = psit_from_fs(past_end, g);
    CHECK(f.same_sections(section(g, kInfIndex, false)));

    FundamentalSequence decreasing;
    decreasing.taus = {constant_time(4, 1), constant_time(3, 1)};
    CHECK(throws_with([&] { psit_from_fs(decreasing, g); }, "path 0"));
}

TEST_CASE("canonical exhaustion round-trips to the same set") {
    TimeGrid g = make_grid(1.0, 16);
    for (int debut : {1, 2, 3, 7, 15, 16}) {
        for (bool open : {false, true}) {
            if (debut == 0 && open) continue;
            Psit b = section(g, debut, open);
            CHECK(psit_from_fs(canonical_fs(b), g).same_sections(b));
        }
    }
    Psit f = section(g, kInfIndex, false);
    CHECK(psit_from_fs(canonical_fs(f), g).same_sections(f));
}

TEST_CASE("node lookup accepts nodes and rejects off-grid values") {
    TimeGrid g = make_grid(1.0, 10);
    CHECK(node_index(g, 0.0) == 0);
    CHECK(node_index(g, 0.5) == 5);
    CHECK(node_index(g, 1.0) == 10);
    CHECK(node_index(g, 0.1 + 0.2) == 3);  // tolerant to accumulated rounding
    CHECK(throws_with([&] { node_index(g, 0.333); }, "not a grid node"));
    CHECK_THROWS_AS(node_index(g, 1.2), std::invalid_argument);
}

TEST_CASE("trading horizon cut by a default time") {
    TimeGrid g = make_grid(1.0, 10);

    StoppingTime tau;
    tau.index = {4, kInfIndex, 12};
    DefaultHorizon dh = psit_default_horizon(1.0, tau, g);

    // Default inside the window: open at the default index.
    CHECK(dh.psit.debut[0] == 4);
    CHECK_FALSE(dh.psit.closed[0]);
    CHECK(dh.psit.last_index(0) == 3);
    // No default: the full closed horizon.
    CHECK(dh.psit.last_index(1) == 10);
    CHECK(dh.psit.closed[1]);
    // Default beyond the horizon: closed at the terminal node.
    CHECK(dh.psit.last_index(2) == 10);

    // The announcing times are increasing, capped by the horizon, and cover
    // the section.
    for (std::size_t m = 0; m + 1 < dh.announcing.taus.size(); ++m)
        for (int p = 0; p < 3; ++p)
            CHECK(dh.announcing.taus[m].index[p] <= dh.announcing.taus[m + 1].index[p]);
    for (int p = 0; p < 3; ++p) {
        const auto& last_tau = dh.announcing.taus.back();
        CHECK(last_tau.index[p] == dh.psit.last_index(p));
        CHECK(last_tau.index[p] <= 10);
    }

    StoppingTime at_zero;
    at_zero.index = {0};
    CHECK(throws_with([&] { psit_default_horizon(1.0, at_zero, g); }, "empties the section"));

    CHECK_THROWS_AS(psit_default_horizon(0.333, tau, g), std::invalid_argument);
}
