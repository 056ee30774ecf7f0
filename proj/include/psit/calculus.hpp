#pragma once

#include <functional>
#include <vector>

#include "psit/process.hpp"

namespace psit {

// Integrands are passed as the adapted process itself; every integral
// evaluates them at the left endpoint of each step (the discrete proxy for
// predictability). The left-limit process therefore never needs to be formed
// before integrating.

// X_-: value at k is X[k-1] for k >= 1, X[0] at 0.
ProcessOnB left_limits(const ProcessOnB& x);

// Jump process: the whole increment at an annotated index, zero elsewhere.
ProcessOnB jumps(const ProcessOnB& x);

// Running sum of a thin process over the section.
ProcessOnB summation(const ProcessOnB& x);

struct IntegralSegment {
    StoppingTime tau;
    PathEnsemble piece;  // full-grid classic integral of the stopped pair
};

// Value at index 0 is H_0 * X_0 by convention.
struct IntegralResult {
    ProcessOnB value;
    std::vector<IntegralSegment> segments;
};

// Lebesgue-Stieltjes integral on B:
//   L[k] = H[0]*A[0] + sum_{j<=k} H[j-1] * (A[j] - A[j-1]).
IntegralResult ls_integral(const ProcessOnB& h, const ProcessOnB& a);

// Classic integral of each coupled-sequence member pair on the full grid,
// then glued over (T_{n-1}, T_n]. Both sequences must share their times.
// Equals ls_integral of the glued processes bitwise.
IntegralResult ls_integral_glued(const CoupledSequence& h_cs, const CoupledSequence& a_cs,
                                 const Psit& psit);

// total = initial + continuous + jump at every section index, by construction.
struct QuadraticDecomposition {
    ProcessOnB total;
    ProcessOnB continuous;
    ProcessOnB jump_part;
    std::vector<double> initial;  // X_0 * Y_0 per path
};

QuadraticDecomposition quad_covar(const ProcessOnB& x, const ProcessOnB& y);

// Semimartingale integral on B. Same arithmetic as ls_integral on a finite
// grid; additionally reports the glued pieces H^{tau_n} . X^{tau_n} over the
// canonical exhaustion of the section.
IntegralResult stoch_integral(const ProcessOnB& h, const ProcessOnB& x);

// Stitch a segment decomposition back into one process: piece n on
// (tau_{n-1}, tau_n] intersect B (piece 0 from the origin), frozen beyond the
// section. Reassembling the segments of stoch_integral reproduces its value
// bitwise. Jump marks are not part of the decomposition and stay empty.
ProcessOnB reassemble_segments(const std::vector<IntegralSegment>& segments, const Psit& set);

struct ScalarC2 {
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<double(double)> d2f;
};

// Change-of-variable residual
//   [f(X) - f(X_0)] - f'(X_-).(X - X_0) - sum over jumps of
//   (f(X) - f(X_-) - f'(X_-) dX) - 1/2 f''(X_-).<X^c>,
// with <X^c> the continuous part of quad_covar(X, X). Zero for polynomials
// of degree <= 2 up to roundoff.
ProcessOnB ito_residual(const ScalarC2& f, const ProcessOnB& x);

struct MultiC2 {
    std::function<double(const std::vector<double>&)> f;
    std::function<std::vector<double>(const std::vector<double>&)> grad;
    std::function<std::vector<std::vector<double>>(const std::vector<double>&)> hess;
};

ProcessOnB ito_residual_multi(const MultiC2& F, const std::vector<ProcessOnB>& z);

// XY - (X_-).Y - (Y_-).X - [X,Y] + 2 X_0 Y_0; zero up to roundoff.
ProcessOnB ibp_residual(const ProcessOnB& x, const ProcessOnB& y);

// s0 * exp(Z - 1/2 <Z^c>) for a continuous driver with Z_0 = 0; the closed
// form of the unique solution of S = s0 + S_- . Z.
ProcessOnB stoch_exp(const ProcessOnB& z, double s0);

// Explicit recursion S[k] = S[k-1] * (1 + dZ[k]); satisfies the discrete
// integral equation S = s0 + (S_-).(Z - Z_0) up to roundoff.
ProcessOnB euler_exp(const ProcessOnB& z, double s0);

}  // namespace psit
