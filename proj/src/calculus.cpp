#include "psit/calculus.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace psit {

namespace {

void require_shared_set(const ProcessOnB& a, const ProcessOnB& b, const char* who) {
    if (!a.grid().same_as(b.grid()) || a.n_paths() != b.n_paths() ||
        !a.psit.same_sections(b.psit))
        throw std::invalid_argument(std::string(who) + ": operands live on different sets");
}

// Classic left-endpoint integral of one full-grid path pair, sequential
// accumulation. The shared arithmetic kernel of every integral here.
std::vector<double> classic_integral(const std::vector<double>& h,
                                     const std::vector<double>& a) {
    std::vector<double> out(a.size());
    out[0] = h[0] * a[0];
    for (std::size_t k = 1; k < a.size(); ++k)
        out[k] = out[k - 1] + h[k - 1] * (a[k] - a[k - 1]);
    return out;
}

// Same kernel but stopped at the section end and frozen beyond it, so the
// result depends only on values inside B.
void kernel_on_section(const std::vector<double>& h, const std::vector<double>& a,
                       int last, std::vector<double>& out) {
    out.resize(a.size());
    out[0] = h[0] * a[0];
    for (int k = 1; k <= last; ++k)
        out[k] = out[k - 1] + h[k - 1] * (a[k] - a[k - 1]);
    for (int k = last + 1; k < static_cast<int>(a.size()); ++k) out[k] = out[last];
}

std::vector<int> marks_in_section(const std::vector<int>& marks, int last) {
    std::vector<int> out;
    for (int m : marks) {
        if (m > last) break;
        out.push_back(m);
    }
    return out;
}

ProcessOnB blank_like(const ProcessOnB& x) {
    ProcessOnB out;
    out.psit = x.psit;
    out.ens.grid = x.grid();
    out.ens.paths.resize(x.n_paths());
    for (int p = 0; p < x.n_paths(); ++p) {
        out.ens.paths[p].grid = x.grid();
        out.ens.paths[p].values.assign(x.grid().steps + 1, 0.0);
    }
    return out;
}

}  // namespace

ProcessOnB left_limits(const ProcessOnB& x) {
    ProcessOnB out = blank_like(x);
    for (int p = 0; p < x.n_paths(); ++p) {
        const auto& v = x.ens.paths[p].values;
        auto& o = out.ens.paths[p].values;
        o[0] = v[0];  // X_{0-} = X_0
        for (std::size_t k = 1; k < v.size(); ++k) o[k] = v[k - 1];
    }
    return out;
}

ProcessOnB jumps(const ProcessOnB& x) {
    ProcessOnB out = blank_like(x);
    for (int p = 0; p < x.n_paths(); ++p) {
        const SamplePath& in = x.ens.paths[p];
        SamplePath& o = out.ens.paths[p];
        int last = x.psit.last_index(p);
        for (int m : in.jump_marks) {
            if (m > last) break;
            o.values[m] = in.values[m] - in.values[m - 1];
            o.jump_marks.push_back(m);
        }
    }
    return out;
}

ProcessOnB summation(const ProcessOnB& x) {
    ProcessOnB out = blank_like(x);
    for (int p = 0; p < x.n_paths(); ++p) {
        const SamplePath& in = x.ens.paths[p];
        SamplePath& o = out.ens.paths[p];
        int last = x.psit.last_index(p);
        double acc = 0.0;
        for (int k = 0; k <= last; ++k) {
            acc += in.values[k];
            o.values[k] = acc;
        }
        for (int k = last + 1; k <= x.grid().steps; ++k) o.values[k] = acc;
        o.jump_marks = marks_in_section(in.jump_marks, last);
    }
    return out;
}

IntegralResult ls_integral(const ProcessOnB& h, const ProcessOnB& a) {
    require_shared_set(h, a, "ls_integral");
    IntegralResult res;
    res.value = blank_like(a);
    for (int p = 0; p < a.n_paths(); ++p) {
        int last = a.psit.last_index(p);
        kernel_on_section(h.ens.paths[p].values, a.ens.paths[p].values, last,
                          res.value.ens.paths[p].values);
        res.value.ens.paths[p].jump_marks =
            marks_in_section(a.ens.paths[p].jump_marks, last);
    }
    return res;
}

IntegralResult ls_integral_glued(const CoupledSequence& h_cs, const CoupledSequence& a_cs,
                                 const Psit& psit) {
    if (h_cs.size() != a_cs.size())
        throw std::invalid_argument("ls_integral_glued: sequences have different lengths");
    for (int m = 0; m < h_cs.size(); ++m)
        if (h_cs.times[m].index != a_cs.times[m].index)
            throw std::invalid_argument(
                "ls_integral_glued: integrand and integrator sequences must share times");
    CsReport hr = validate_cs(h_cs, psit);
    if (!hr.ok())
        throw std::invalid_argument("ls_integral_glued: integrand " +
                                    hr.violations.front().describe());
    CsReport ar = validate_cs(a_cs, psit);
    if (!ar.ok())
        throw std::invalid_argument("ls_integral_glued: integrator " +
                                    ar.violations.front().describe());

    const int n = psit.n_paths();
    const int K = psit.grid.steps;
    IntegralResult res;
    res.value.psit = psit;
    res.value.ens.grid = psit.grid;
    res.value.ens.paths.resize(n);
    res.segments.reserve(h_cs.size());

    // full-grid classic integrals of every member pair; garbage beyond each
    // member's window never enters the glued values below
    std::vector<std::vector<std::vector<double>>> pieces(h_cs.size());
    for (int m = 0; m < h_cs.size(); ++m) {
        IntegralSegment seg;
        seg.tau = h_cs.times[m];
        seg.piece.grid = psit.grid;
        seg.piece.paths.resize(n);
        pieces[m].resize(n);
        for (int p = 0; p < n; ++p) {
            pieces[m][p] = classic_integral(h_cs.members[m].paths[p].values,
                                            a_cs.members[m].paths[p].values);
            seg.piece.paths[p].grid = psit.grid;
            seg.piece.paths[p].values = pieces[m][p];
        }
        res.segments.push_back(std::move(seg));
    }

    for (int p = 0; p < n; ++p) {
        SamplePath& sp = res.value.ens.paths[p];
        sp.grid = psit.grid;
        sp.values.resize(K + 1);
        int last = psit.last_index(p);
        sp.values[0] = pieces[0][p][0];
        for (int k = 1; k <= last; ++k) {
            int seg = 0;
            while (seg < h_cs.size()) {
                int t = h_cs.times[seg].index[p];
                if (t == kInfIndex || t >= k) break;
                ++seg;
            }
            sp.values[k] = pieces[seg][p][k];
            if (a_cs.members[seg].paths[p].has_jump_at(k)) sp.jump_marks.push_back(k);
        }
        for (int k = last + 1; k <= K; ++k) sp.values[k] = sp.values[last];
    }
    return res;
}

QuadraticDecomposition quad_covar(const ProcessOnB& x, const ProcessOnB& y) {
    require_shared_set(x, y, "quad_covar");
    QuadraticDecomposition q;
    q.total = blank_like(x);
    q.continuous = blank_like(x);
    q.jump_part = blank_like(x);
    q.initial.resize(x.n_paths());
    for (int p = 0; p < x.n_paths(); ++p) {
        const SamplePath& px = x.ens.paths[p];
        const SamplePath& py = y.ens.paths[p];
        int last = x.psit.last_index(p);
        auto& total = q.total.ens.paths[p].values;
        auto& cont = q.continuous.ens.paths[p].values;
        auto& jump = q.jump_part.ens.paths[p].values;
        double initial = px.values[0] * py.values[0];
        q.initial[p] = initial;
        total[0] = initial;
        jump[0] = 0.0;
        cont[0] = 0.0;
        for (int k = 1; k <= last; ++k) {
            double prod = (px.values[k] - px.values[k - 1]) * (py.values[k] - py.values[k - 1]);
            bool both_marked = px.has_jump_at(k) && py.has_jump_at(k);
            jump[k] = jump[k - 1] + (both_marked ? prod : 0.0);
            cont[k] = cont[k - 1] + (both_marked ? 0.0 : prod);
            total[k] = initial + cont[k] + jump[k];
            if (both_marked) {
                q.total.ens.paths[p].jump_marks.push_back(k);
                q.jump_part.ens.paths[p].jump_marks.push_back(k);
            }
        }
        for (int k = last + 1; k <= x.grid().steps; ++k) {
            total[k] = total[last];
            cont[k] = cont[last];
            jump[k] = jump[last];
        }
    }
    return q;
}

IntegralResult stoch_integral(const ProcessOnB& h, const ProcessOnB& x) {
    require_shared_set(h, x, "stoch_integral");
    IntegralResult res = ls_integral(h, x);

    FundamentalSequence fs = canonical_fs(x.psit);
    res.segments.reserve(fs.size());
    for (const auto& tau : fs.taus) {
        IntegralSegment seg;
        seg.tau = tau;
        PathEnsemble hs = stop(h, tau);
        PathEnsemble xs = stop(x, tau);
        seg.piece.grid = x.grid();
        seg.piece.paths.resize(x.n_paths());
        for (int p = 0; p < x.n_paths(); ++p) {
            seg.piece.paths[p].grid = x.grid();
            seg.piece.paths[p].values =
                classic_integral(hs.paths[p].values, xs.paths[p].values);
        }
        res.segments.push_back(std::move(seg));
    }
    return res;
}

ProcessOnB reassemble_segments(const std::vector<IntegralSegment>& segments, const Psit& set) {
    if (segments.empty()) throw std::invalid_argument("reassemble_segments: no segments");
    const int n = static_cast<int>(set.debut.size());
    const int steps = set.grid.steps;
    for (const auto& seg : segments) {
        if (static_cast<int>(seg.tau.index.size()) != n || seg.piece.n_paths() != n ||
            !seg.piece.grid.same_as(set.grid))
            throw std::invalid_argument("reassemble_segments: segment does not match the set");
    }

    PathEnsemble out;
    out.grid = set.grid;
    out.paths.resize(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p) {
        auto& v = out.paths[p].values;
        out.paths[p].grid = set.grid;
        v.resize(static_cast<std::size_t>(steps) + 1);
        const int last = set.last_index(p);
        std::size_t m = 0;
        for (int k = 0; k <= last; ++k) {
            while (m + 1 < segments.size() && segments[m].tau.index[p] < k) ++m;
            if (segments[m].tau.index[p] < k)
                throw std::invalid_argument("reassemble_segments: segments do not cover the set");
            v[k] = segments[m].piece.paths[p].values[k];
        }
        for (int k = last + 1; k <= steps; ++k) v[k] = v[last];
    }
    return make_process(set, out);
}

ProcessOnB ito_residual(const ScalarC2& fn, const ProcessOnB& x) {
    ProcessOnB fX = map_values(x, fn.f);
    ProcessOnB dfX = map_values(x, fn.df);
    ProcessOnB d2fX = map_values(x, fn.d2f);

    ProcessOnB drift = stoch_integral(dfX, shift_by_initial(x)).value;
    QuadraticDecomposition qv = quad_covar(x, x);
    ProcessOnB second = stoch_integral(d2fX, qv.continuous).value;

    // thin jump corrections f(X) - f(X_-) - f'(X_-) dX at annotated indices
    ProcessOnB eta_terms = blank_like(x);
    for (int p = 0; p < x.n_paths(); ++p) {
        const SamplePath& in = x.ens.paths[p];
        int last = x.psit.last_index(p);
        for (int m : in.jump_marks) {
            if (m > last) break;
            double inc = in.values[m] - in.values[m - 1];
            eta_terms.ens.paths[p].values[m] =
                fn.f(in.values[m]) - fn.f(in.values[m - 1]) - fn.df(in.values[m - 1]) * inc;
        }
    }
    ProcessOnB eta = summation(eta_terms);

    ProcessOnB res = blank_like(x);
    for (int p = 0; p < x.n_paths(); ++p) {
        int last = x.psit.last_index(p);
        auto& o = res.ens.paths[p].values;
        double f0 = fX.ens.paths[p].values[0];
        for (int k = 0; k <= last; ++k) {
            o[k] = (fX.ens.paths[p].values[k] - f0) - drift.ens.paths[p].values[k] -
                   eta.ens.paths[p].values[k] - 0.5 * second.ens.paths[p].values[k];
        }
        for (int k = last + 1; k <= x.grid().steps; ++k) o[k] = o[last];
    }
    return res;
}

ProcessOnB ito_residual_multi(const MultiC2& F, const std::vector<ProcessOnB>& z) {
    if (z.empty()) throw std::invalid_argument("ito_residual_multi: no components");
    const int d = static_cast<int>(z.size());
    for (int i = 1; i < d; ++i) require_shared_set(z[0], z[i], "ito_residual_multi");

    const ProcessOnB& x0 = z[0];
    ProcessOnB res = blank_like(x0);
    std::vector<double> cur(d), prev(d), jump(d);
    for (int p = 0; p < x0.n_paths(); ++p) {
        int last = x0.psit.last_index(p);
        auto& o = res.ens.paths[p].values;
        for (int i = 0; i < d; ++i) cur[i] = z[i].ens.paths[p].values[0];
        const double f_start = F.f(cur);
        o[0] = 0.0;
        double drift = 0.0, second = 0.0, eta = 0.0;
        for (int k = 1; k <= last; ++k) {
            for (int i = 0; i < d; ++i) {
                prev[i] = z[i].ens.paths[p].values[k - 1];
                cur[i] = z[i].ens.paths[p].values[k];
            }
            std::vector<double> g = F.grad(prev);
            auto hess = F.hess(prev);
            bool any_mark = false;
            for (int i = 0; i < d; ++i) {
                double inc = cur[i] - prev[i];
                drift += g[i] * inc;
                bool marked = z[i].ens.paths[p].has_jump_at(k);
                jump[i] = marked ? inc : 0.0;
                any_mark = any_mark || marked;
            }
            for (int i = 0; i < d; ++i)
                for (int l = 0; l < d; ++l) {
                    double inc_i = cur[i] - prev[i];
                    double inc_l = cur[l] - prev[l];
                    // continuous bracket increment: full product minus the
                    // both-marked jump product, matching quad_covar
                    double cont = inc_i * inc_l - jump[i] * jump[l];
                    second += hess[i][l] * cont;
                }
            if (any_mark) {
                std::vector<double> at_jump(d);
                for (int i = 0; i < d; ++i) at_jump[i] = prev[i] + jump[i];
                double lin = 0.0;
                for (int i = 0; i < d; ++i) lin += g[i] * jump[i];
                eta += F.f(at_jump) - F.f(prev) - lin;
            }
            o[k] = (F.f(cur) - f_start) - drift - eta - 0.5 * second;
        }
        for (int k = last + 1; k <= x0.grid().steps; ++k) o[k] = o[last];
    }
    return res;
}

ProcessOnB ibp_residual(const ProcessOnB& x, const ProcessOnB& y) {
    require_shared_set(x, y, "ibp_residual");
    ProcessOnB xy = pointwise_product(x, y);
    ProcessOnB ix = stoch_integral(x, y).value;  // (X_-).Y under the left-endpoint rule
    ProcessOnB iy = stoch_integral(y, x).value;
    QuadraticDecomposition qv = quad_covar(x, y);

    ProcessOnB res = blank_like(x);
    for (int p = 0; p < x.n_paths(); ++p) {
        int last = x.psit.last_index(p);
        double init2 = 2.0 * x.ens.paths[p].values[0] * y.ens.paths[p].values[0];
        auto& o = res.ens.paths[p].values;
        for (int k = 0; k <= last; ++k) {
            o[k] = xy.ens.paths[p].values[k] - ix.ens.paths[p].values[k] -
                   iy.ens.paths[p].values[k] - qv.total.ens.paths[p].values[k] + init2;
        }
        for (int k = last + 1; k <= x.grid().steps; ++k) o[k] = o[last];
    }
    return res;
}

ProcessOnB stoch_exp(const ProcessOnB& z, double s0) {
    if (!(s0 > 0.0)) throw std::invalid_argument("stoch_exp: s0 must be > 0");
    for (int p = 0; p < z.n_paths(); ++p) {
        int last = z.psit.last_index(p);
        if (z.ens.paths[p].values[0] != 0.0)
            throw std::invalid_argument("stoch_exp: driver must start at 0, path " +
                                        std::to_string(p));
        if (!marks_in_section(z.ens.paths[p].jump_marks, last).empty())
            throw std::invalid_argument("stoch_exp: driver must be continuous, path " +
                                        std::to_string(p));
    }
    QuadraticDecomposition qv = quad_covar(z, z);
    ProcessOnB out = blank_like(z);
    for (int p = 0; p < z.n_paths(); ++p) {
        int last = z.psit.last_index(p);
        auto& o = out.ens.paths[p].values;
        const auto& v = z.ens.paths[p].values;
        const auto& c = qv.continuous.ens.paths[p].values;
        for (int k = 0; k <= last; ++k) o[k] = s0 * std::exp(v[k] - 0.5 * c[k]);
        for (int k = last + 1; k <= z.grid().steps; ++k) o[k] = o[last];
    }
    return out;
}

ProcessOnB euler_exp(const ProcessOnB& z, double s0) {
    if (!(s0 > 0.0)) throw std::invalid_argument("euler_exp: s0 must be > 0");
    ProcessOnB out = blank_like(z);
    for (int p = 0; p < z.n_paths(); ++p) {
        int last = z.psit.last_index(p);
        auto& o = out.ens.paths[p].values;
        const auto& v = z.ens.paths[p].values;
        o[0] = s0;
        for (int k = 1; k <= last; ++k) o[k] = o[k - 1] * (1.0 + (v[k] - v[k - 1]));
        for (int k = last + 1; k <= z.grid().steps; ++k) o[k] = o[last];
        out.ens.paths[p].jump_marks =
            marks_in_section(z.ens.paths[p].jump_marks, last);
    }
    return out;
}

}  // namespace psit
