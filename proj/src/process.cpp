#include "psit/process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace psit {

namespace {

void require_shapes(const Psit& psit, const PathEnsemble& ens) {
    if (!psit.grid.same_as(ens.grid))
        throw std::invalid_argument("process on B: psit and ensemble grids differ");
    if (psit.n_paths() != ens.n_paths())
        throw std::invalid_argument("process on B: psit and ensemble path counts differ");
}

void require_same_shape(const ProcessOnB& a, const ProcessOnB& b) {
    if (!a.grid().same_as(b.grid()))
        throw std::invalid_argument("processes live on different grids");
    if (a.n_paths() != b.n_paths())
        throw std::invalid_argument("processes have different path counts");
    if (!a.psit.same_sections(b.psit))
        throw std::invalid_argument("processes live on different sets");
}

// T must satisfy [0, T] inside the section of every path.
void require_stopping_on_b(const ProcessOnB& x, const StoppingTime& T) {
    if (T.n_paths() != x.n_paths())
        throw std::invalid_argument("stopping time path count differs from process");
    for (int p = 0; p < x.n_paths(); ++p) {
        int t = T.index[p];
        int last = x.psit.last_index(p);
        bool ok = t == kInfIndex ? last == x.grid().steps : (t >= 0 && t <= last);
        if (!ok)
            throw std::invalid_argument("stopping time exits the set on path " +
                                        std::to_string(p));
    }
}

std::vector<int> marks_up_to(const std::vector<int>& marks, int bound) {
    std::vector<int> out;
    for (int m : marks) {
        if (m > bound) break;
        out.push_back(m);
    }
    return out;
}

}  // namespace

ProcessOnB make_process(const Psit& psit, const PathEnsemble& ens) {
    require_shapes(psit, ens);
    return ProcessOnB{psit, ens};
}

ProcessOnB restrict_to(const PathEnsemble& ens, const Psit& psit) {
    return make_process(psit, ens);
}

ProcessOnB restrict_to(const ProcessOnB& x, const Psit& finer) {
    if (!finer.subset_of(x.psit))
        throw std::invalid_argument("restrict_to: target set is not contained in the source set");
    return ProcessOnB{finer, x.ens};
}

PathEnsemble stop(const ProcessOnB& x, const StoppingTime& T) {
    require_stopping_on_b(x, T);
    PathEnsemble out;
    out.grid = x.grid();
    out.paths.resize(x.n_paths());
    for (int p = 0; p < x.n_paths(); ++p) {
        const SamplePath& in = x.ens.paths[p];
        SamplePath& sp = out.paths[p];
        sp.grid = in.grid;
        int t = T.index[p];
        if (t == kInfIndex || t >= x.grid().steps) {
            sp = in;
            continue;
        }
        sp.values.resize(in.values.size());
        for (int k = 0; k <= t; ++k) sp.values[k] = in.values[k];
        for (int k = t + 1; k <= x.grid().steps; ++k) sp.values[k] = in.values[t];
        sp.jump_marks = marks_up_to(in.jump_marks, t);
    }
    return out;
}

PathEnsemble stop_strict(const ProcessOnB& x, const StoppingTime& T) {
    require_stopping_on_b(x, T);
    for (int p = 0; p < x.n_paths(); ++p)
        if (T.index[p] < 1)
            throw std::invalid_argument("stop_strict: stopping time must be >= 1, path " +
                                        std::to_string(p));
    PathEnsemble out;
    out.grid = x.grid();
    out.paths.resize(x.n_paths());
    for (int p = 0; p < x.n_paths(); ++p) {
        const SamplePath& in = x.ens.paths[p];
        SamplePath& sp = out.paths[p];
        sp.grid = in.grid;
        int t = T.index[p];
        if (t == kInfIndex || t > x.grid().steps) {
            sp = in;
            continue;
        }
        sp.values.resize(in.values.size());
        for (int k = 0; k < t; ++k) sp.values[k] = in.values[k];
        for (int k = t; k <= x.grid().steps; ++k) sp.values[k] = in.values[t - 1];
        sp.jump_marks = marks_up_to(in.jump_marks, t - 1);
    }
    return out;
}

std::string CsViolation::describe() const {
    switch (kind) {
        case Kind::monotonicity:
            return "times decrease between members " + std::to_string(k) + " and " +
                   std::to_string(l) + " on path " + std::to_string(path);
        case Kind::coverage:
            return "times do not cover the set on path " + std::to_string(path);
        case Kind::consistency:
            return "members " + std::to_string(k) + " and " + std::to_string(l) +
                   " disagree on path " + std::to_string(path) + " at index " +
                   std::to_string(index);
        case Kind::jump_marks:
            return "members " + std::to_string(k) + " and " + std::to_string(l) +
                   " have different jump marks on path " + std::to_string(path) +
                   " at index " + std::to_string(index);
    }
    return "unknown violation";
}

CsReport validate_cs(const CoupledSequence& cs, const Psit& psit) {
    CsReport report;
    if (cs.size() == 0) {
        report.violations.push_back({CsViolation::Kind::coverage, -1, -1, -1, -1});
        return report;
    }
    if (static_cast<int>(cs.members.size()) != cs.size())
        throw std::invalid_argument("validate_cs: times and members length mismatch");
    const int n = psit.n_paths();
    for (int m = 0; m < cs.size(); ++m) {
        if (cs.times[m].n_paths() != n || cs.members[m].n_paths() != n)
            throw std::invalid_argument("validate_cs: member path count mismatch");
        if (!cs.members[m].grid.same_as(psit.grid))
            throw std::invalid_argument("validate_cs: member grid mismatch");
    }

    for (int m = 0; m + 1 < cs.size(); ++m)
        for (int p = 0; p < n; ++p)
            if (cs.times[m + 1].index[p] < cs.times[m].index[p])
                report.violations.push_back(
                    {CsViolation::Kind::monotonicity, m, m + 1, p, -1});

    for (int p = 0; p < n; ++p) {
        int best = -1;
        for (int m = 0; m < cs.size(); ++m) {
            int t = cs.times[m].index[p];
            best = std::max(best, t == kInfIndex ? psit.grid.steps : t);
        }
        if (best < psit.last_index(p))
            report.violations.push_back({CsViolation::Kind::coverage, -1, -1, p, -1});
    }

    for (int k = 0; k < cs.size(); ++k) {
        for (int l = k + 1; l < cs.size(); ++l) {
            for (int p = 0; p < n; ++p) {
                int tk = cs.times[k].index[p];
                int bound = std::min(tk == kInfIndex ? psit.grid.steps : tk,
                                     psit.last_index(p));
                const SamplePath& a = cs.members[k].paths[p];
                const SamplePath& b = cs.members[l].paths[p];
                for (int j = 0; j <= bound; ++j) {
                    if (a.values[j] != b.values[j]) {
                        report.violations.push_back(
                            {CsViolation::Kind::consistency, k, l, p, j});
                        break;
                    }
                }
                auto ma = marks_up_to(a.jump_marks, bound);
                auto mb = marks_up_to(b.jump_marks, bound);
                if (ma != mb) {
                    int j = 0;
                    while (j < static_cast<int>(std::min(ma.size(), mb.size())) &&
                           ma[j] == mb[j])
                        ++j;
                    int at = j < static_cast<int>(ma.size())
                                 ? ma[j]
                                 : (j < static_cast<int>(mb.size()) ? mb[j] : bound);
                    report.violations.push_back(
                        {CsViolation::Kind::jump_marks, k, l, p, at});
                }
            }
        }
    }
    return report;
}

ProcessOnB glue(const CoupledSequence& cs, const Psit& psit) {
    CsReport report = validate_cs(cs, psit);
    if (!report.ok())
        throw std::invalid_argument("glue: " + report.violations.front().describe());

    const int n = psit.n_paths();
    const int K = psit.grid.steps;
    PathEnsemble out;
    out.grid = psit.grid;
    out.paths.resize(n);
    for (int p = 0; p < n; ++p) {
        SamplePath& sp = out.paths[p];
        sp.grid = psit.grid;
        sp.values.resize(K + 1);
        const int last = psit.last_index(p);
        sp.values[0] = cs.members[0].paths[p].values[0];
        for (int k = 1; k <= last; ++k) {
            int seg = 0;
            while (seg < cs.size()) {
                int t = cs.times[seg].index[p];
                if (t == kInfIndex || t >= k) break;
                ++seg;
            }
            // coverage was validated, so seg is in range
            const SamplePath& m = cs.members[seg].paths[p];
            sp.values[k] = m.values[k];
            if (m.has_jump_at(k)) sp.jump_marks.push_back(k);
        }
        for (int k = last + 1; k <= K; ++k) sp.values[k] = sp.values[last];
    }
    return ProcessOnB{psit, out};
}

CoupledSequence coupled_from_process(const ProcessOnB& x, const FundamentalSequence& fs) {
    CoupledSequence cs;
    for (const auto& tau : fs.taus) {
        cs.times.push_back(tau);
        cs.members.push_back(stop(x, tau));
    }
    return cs;
}

bool equal_on_b(const ProcessOnB& a, const ProcessOnB& b) {
    if (!a.grid().same_as(b.grid()) || a.n_paths() != b.n_paths()) return false;
    if (!a.psit.same_sections(b.psit)) return false;
    for (int p = 0; p < a.n_paths(); ++p) {
        int last = a.psit.last_index(p);
        const SamplePath& pa = a.ens.paths[p];
        const SamplePath& pb = b.ens.paths[p];
        for (int k = 0; k <= last; ++k)
            if (pa.values[k] != pb.values[k]) return false;
        if (marks_up_to(pa.jump_marks, last) != marks_up_to(pb.jump_marks, last))
            return false;
    }
    return true;
}

double max_rel_diff_on_b(const ProcessOnB& a, const ProcessOnB& b) {
    require_same_shape(a, b);
    double scale = 1.0;
    double diff = 0.0;
    for (int p = 0; p < a.n_paths(); ++p) {
        int last = a.psit.last_index(p);
        for (int k = 0; k <= last; ++k) {
            double va = a.ens.paths[p].values[k];
            double vb = b.ens.paths[p].values[k];
            scale = std::max({scale, std::abs(va), std::abs(vb)});
            diff = std::max(diff, std::abs(va - vb));
        }
    }
    return diff / scale;
}

ProcessOnB map_values(const ProcessOnB& x, const std::function<double(double)>& fn) {
    ProcessOnB out = x;
    for (auto& path : out.ens.paths)
        for (auto& v : path.values) v = fn(v);
    return out;
}

ProcessOnB lin_comb(double a, const ProcessOnB& x, double b, const ProcessOnB& y) {
    require_same_shape(x, y);
    ProcessOnB out = x;
    for (int p = 0; p < x.n_paths(); ++p) {
        auto& vo = out.ens.paths[p].values;
        const auto& vy = y.ens.paths[p].values;
        for (std::size_t k = 0; k < vo.size(); ++k) vo[k] = a * vo[k] + b * vy[k];
        std::vector<int> merged = out.ens.paths[p].jump_marks;
        merged.insert(merged.end(), y.ens.paths[p].jump_marks.begin(),
                      y.ens.paths[p].jump_marks.end());
        std::sort(merged.begin(), merged.end());
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
        out.ens.paths[p].jump_marks = std::move(merged);
    }
    return out;
}

ProcessOnB pointwise_product(const ProcessOnB& x, const ProcessOnB& y) {
    require_same_shape(x, y);
    ProcessOnB out = x;
    for (int p = 0; p < x.n_paths(); ++p) {
        auto& vo = out.ens.paths[p].values;
        const auto& vy = y.ens.paths[p].values;
        for (std::size_t k = 0; k < vo.size(); ++k) vo[k] *= vy[k];
        std::vector<int> merged = out.ens.paths[p].jump_marks;
        merged.insert(merged.end(), y.ens.paths[p].jump_marks.begin(),
                      y.ens.paths[p].jump_marks.end());
        std::sort(merged.begin(), merged.end());
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
        out.ens.paths[p].jump_marks = std::move(merged);
    }
    return out;
}

ProcessOnB shift_by_initial(const ProcessOnB& x) {
    ProcessOnB out = x;
    for (auto& path : out.ens.paths) {
        double x0 = path.values[0];
        for (auto& v : path.values) v -= x0;
    }
    return out;
}

}  // namespace psit
