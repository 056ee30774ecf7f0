#include "psit/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "psit/grid_paths.hpp"

namespace psit {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path + ": " + msg);
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1,
                               diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> known) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const std::string& key = it.key();
        if (std::any_of(known.begin(), known.end(),
                        [&](const char* k) { return key == k; }))
            continue;
        std::string msg = "unknown key '" + key + "'";
        std::size_t best = std::string::npos;
        const char* hint = nullptr;
        for (const char* k : known) {
            const std::size_t d = edit_distance(key, k);
            if (d < best) {
                best = d;
                hint = k;
            }
        }
        if (hint && best <= std::max<std::size_t>(2, key.size() / 2))
            msg += " (did you mean '" + std::string(hint) + "'?)";
        fail(path, msg);
    }
}

const json& require(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, "missing required key '" + std::string(key) + "'");
    return *it;
}

const json* optional(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
}

long long as_integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "must be an integer");
    return v.get<long long>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "must be a string");
    return v.get<std::string>();
}

void parse_grid(const json& g, MarketInputs& m) {
    if (!g.is_object()) fail("grid", "must be an object");
    check_keys(g, "grid", {"horizon", "steps"});
    const double horizon = as_number(require(g, "grid", "horizon"), "grid.horizon");
    if (!(horizon > 0.0)) fail("grid.horizon", "must be > 0");
    const long long steps = as_integer(require(g, "grid", "steps"), "grid.steps");
    if (steps < 1) fail("grid.steps", "must be >= 1");
    if (steps > 100'000'000) fail("grid.steps", "must be <= 100000000");
    m.grid = make_grid(horizon, static_cast<int>(steps));
}

void parse_rng(const json* r, MarketInputs& m) {
    if (!r) return;
    if (!r->is_object()) fail("rng", "must be an object");
    check_keys(*r, "rng", {"seed", "n_paths"});
    if (const json* s = optional(*r, "seed")) {
        if (!s->is_number_integer() || (s->is_number_integer() && !s->is_number_unsigned() &&
                                        s->get<long long>() < 0))
            fail("rng.seed", "must be a non-negative integer");
        m.rng.master_seed = s->get<std::uint64_t>();
    }
    if (const json* np = optional(*r, "n_paths")) {
        const long long n = as_integer(*np, "rng.n_paths");
        if (n < 1) fail("rng.n_paths", "must be >= 1");
        if (n > 50'000'000) fail("rng.n_paths", "must be <= 50000000");
        m.n_paths = static_cast<int>(n);
    }
}

void parse_default(const json* d, MarketInputs& m) {
    if (!d) return;
    if (!d->is_object()) fail("market.default", "must be an object");
    check_keys(*d, "market.default", {"kind", "value", "rate"});
    const std::string kind = as_string(require(*d, "market.default", "kind"),
                                       "market.default.kind");
    if (kind == "none") {
        m.default_kind = DefaultKind::none;
        if (optional(*d, "value")) fail("market.default.value", "only valid for kind 'fixed'");
        if (optional(*d, "rate")) fail("market.default.rate", "only valid for kind 'exponential'");
    } else if (kind == "fixed") {
        m.default_kind = DefaultKind::fixed;
        if (optional(*d, "rate")) fail("market.default.rate", "only valid for kind 'exponential'");
        m.default_value = as_number(require(*d, "market.default", "value"),
                                    "market.default.value");
        if (!(m.default_value > 0.0)) fail("market.default.value", "must be > 0");
    } else if (kind == "exponential") {
        m.default_kind = DefaultKind::exponential;
        if (optional(*d, "value")) fail("market.default.value", "only valid for kind 'fixed'");
        m.default_rate = as_number(require(*d, "market.default", "rate"),
                                   "market.default.rate");
        if (!(m.default_rate > 0.0)) fail("market.default.rate", "must be > 0");
    } else {
        fail("market.default.kind", "must be one of 'none', 'fixed', 'exponential'");
    }
}

void parse_market(const json& mk, MarketInputs& m) {
    if (!mk.is_object()) fail("market", "must be an object");
    check_keys(mk, "market", {"s0", "x0", "regimes", "default", "terminal", "rho"});

    if (const json* s0 = optional(mk, "s0")) {
        m.s0 = as_number(*s0, "market.s0");
        if (!(m.s0 > 0.0)) fail("market.s0", "must be > 0");
    }
    if (const json* x0 = optional(mk, "x0")) {
        m.x0 = as_number(*x0, "market.x0");
        if (!(m.x0 > 0.0)) fail("market.x0", "must be > 0");
    }

    const json& regimes = require(mk, "market", "regimes");
    if (!regimes.is_array() || regimes.empty())
        fail("market.regimes", "must be a non-empty array");
    for (std::size_t i = 0; i < regimes.size(); ++i) {
        const std::string path = "market.regimes[" + std::to_string(i) + "]";
        const json& r = regimes[i];
        if (!r.is_object()) fail(path, "must be an object");
        check_keys(r, path, {"drift", "sigma"});
        RegimeSpec spec;
        spec.drift = as_number(require(r, path, "drift"), path + ".drift");
        spec.sigma = as_number(require(r, path, "sigma"), path + ".sigma");
        if (!(spec.sigma > 0.0)) fail(path + ".sigma", "must be > 0");
        m.regimes.push_back(spec);
    }

    parse_default(optional(mk, "default"), m);

    const double terminal = as_number(require(mk, "market", "terminal"), "market.terminal");
    if (!(terminal > 0.0)) fail("market.terminal", "must be > 0");
    if (terminal > m.grid.horizon + 1e-9 * m.grid.horizon)
        fail("market.terminal", "must be <= grid.horizon");
    try {
        (void)node_index(m.grid, terminal);
    } catch (const std::invalid_argument&) {
        fail("market.terminal", "not a grid node");
    }
    m.terminal = terminal;

    if (const json* rho = optional(mk, "rho")) {
        if (!rho->is_array() || rho->size() != m.regimes.size())
            fail("market.rho", "must be a square matrix with one row per regime");
        for (std::size_t i = 0; i < rho->size(); ++i) {
            const json& row = (*rho)[i];
            const std::string path = "market.rho[" + std::to_string(i) + "]";
            if (!row.is_array() || row.size() != m.regimes.size())
                fail(path, "must have one entry per regime");
            std::vector<double> out;
            for (std::size_t j = 0; j < row.size(); ++j)
                out.push_back(as_number(row[j], path + "[" + std::to_string(j) + "]"));
            m.rho.push_back(std::move(out));
        }
        for (std::size_t i = 0; i < m.rho.size(); ++i) {
            if (m.rho[i][i] != 1.0) fail("market.rho", "diagonal entries must be 1");
            for (std::size_t j = 0; j < i; ++j)
                if (m.rho[i][j] != m.rho[j][i]) fail("market.rho", "must be symmetric");
        }
        try {
            (void)cholesky_lower(m.rho);
        } catch (const std::invalid_argument& e) {
            fail("market.rho", e.what());
        }
    }
}

void parse_run(const json* r, RunConfig& run) {
    if (!r) return;
    if (!r->is_object()) fail("run", "must be an object");
    check_keys(*r, "run", {"mode", "multipliers", "outputs"});
    if (const json* mode = optional(*r, "mode")) {
        const std::string s = as_string(*mode, "run.mode");
        if (s == "verify")
            run.mode = RunMode::verify;
        else if (s == "simulate")
            run.mode = RunMode::simulate;
        else if (s == "finance")
            run.mode = RunMode::finance;
        else
            fail("run.mode", "must be one of 'verify', 'simulate', 'finance'");
    }
    if (const json* mult = optional(*r, "multipliers")) {
        if (!mult->is_array() || mult->empty())
            fail("run.multipliers", "must be a non-empty array");
        run.multipliers.clear();
        for (std::size_t i = 0; i < mult->size(); ++i) {
            const std::string path = "run.multipliers[" + std::to_string(i) + "]";
            const double c = as_number((*mult)[i], path);
            if (!(c >= 0.0)) fail(path, "must be >= 0");
            run.multipliers.push_back(c);
        }
    }
    if (const json* out = optional(*r, "outputs")) {
        run.outputs = as_string(*out, "run.outputs");
        if (run.outputs.empty()) fail("run.outputs", "must not be empty");
    }
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be an object");
    check_keys(root, "config", {"grid", "rng", "market", "run"});

    ScenarioConfig cfg;
    cfg.market.n_paths = 1000;
    cfg.market.rng.master_seed = 42;
    parse_grid(require(root, "config", "grid"), cfg.market);
    parse_rng(optional(root, "rng"), cfg.market);
    parse_market(require(root, "config", "market"), cfg.market);
    parse_run(optional(root, "run"), cfg.run);
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace psit
