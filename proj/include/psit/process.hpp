#pragma once

#include <functional>
#include <string>
#include <vector>

#include "psit/sets.hpp"

namespace psit {

// A path ensemble whose values are meaningful only inside a Psit. Values at
// indices beyond the section are carried but ignored by every operation.
struct ProcessOnB {
    Psit psit;
    PathEnsemble ens;

    int n_paths() const { return ens.n_paths(); }
    const TimeGrid& grid() const { return ens.grid; }
};

ProcessOnB make_process(const Psit& psit, const PathEnsemble& ens);

// Restriction of a full-grid ensemble to B.
ProcessOnB restrict_to(const PathEnsemble& ens, const Psit& psit);
// Restriction of a process on B to a smaller set; requires finer subset of B.
ProcessOnB restrict_to(const ProcessOnB& x, const Psit& finer);

// Stopped process: frozen at X_T after T, jump marks beyond T dropped.
// T must be a stopping time on B ([0,T] inside the section pathwise).
PathEnsemble stop(const ProcessOnB& x, const StoppingTime& T);

// Pre-T stop: frozen at the left limit X_{T-1}; the mark at T is dropped.
// Requires T >= 1 on every path.
PathEnsemble stop_strict(const ProcessOnB& x, const StoppingTime& T);

// Increasing stopping times T_n paired with full-grid members agreeing on
// B intersect [0, T_n].
struct CoupledSequence {
    std::vector<StoppingTime> times;
    std::vector<PathEnsemble> members;

    int size() const { return static_cast<int>(times.size()); }
};

struct CsViolation {
    enum class Kind { monotonicity, coverage, consistency, jump_marks };
    Kind kind;
    int k = -1;      // earlier member
    int l = -1;      // later member (monotonicity: the pair (k, k+1))
    int path = -1;
    int index = -1;  // smallest offending grid index, -1 when not applicable
    std::string describe() const;
};

struct CsReport {
    std::vector<CsViolation> violations;
    bool ok() const { return violations.empty(); }
};

CsReport validate_cs(const CoupledSequence& cs, const Psit& psit);

// Glue a coupled sequence into the process it determines on B: member 1 on
// {0}, member n on B intersect (T_{n-1}, T_n]. Values beyond the section are
// frozen at the last section value, so the output depends only on data
// inside B. Throws with the first violation if the sequence is not coupled.
ProcessOnB glue(const CoupledSequence& cs, const Psit& psit);

// Canonical coupled sequence (tau_n, X^{tau_n}) of an existing process.
CoupledSequence coupled_from_process(const ProcessOnB& x, const FundamentalSequence& fs);

// Equality on B: identical sections, bitwise value agreement on them, and
// the same jump marks inside them.
bool equal_on_b(const ProcessOnB& a, const ProcessOnB& b);
// Largest |a-b| over the sections, normalized by max(1, sup |a|, sup |b|).
double max_rel_diff_on_b(const ProcessOnB& a, const ProcessOnB& b);

// Pointwise helpers (marks: copied for map_values, merged for combinations).
ProcessOnB map_values(const ProcessOnB& x, const std::function<double(double)>& fn);
ProcessOnB lin_comb(double a, const ProcessOnB& x, double b, const ProcessOnB& y);
ProcessOnB pointwise_product(const ProcessOnB& x, const ProcessOnB& y);
// x scaled and shifted per path by constants.
ProcessOnB shift_by_initial(const ProcessOnB& x);  // x - x_0 on B

}  // namespace psit
