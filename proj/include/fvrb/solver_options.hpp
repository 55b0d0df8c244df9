#pragma once

namespace fvrb {

/// Shared Newton policy for the reduced and the fully coupled solver.
///
/// Iterations are counted per residual evaluation of the outer loop, so a
/// start iterate that already satisfies the tolerance reports one iteration.
/// Each step is capped at min(1, damp_initial * damp_growth^(it-1)) and then
/// backtracked by halving until the Armijo condition on 0.5*||F||^2 holds.
struct NewtonOptions {
    double ftol = 1e-11;  // residual max-norm tolerance
    int max_iters = 200;
    double armijo_c = 1e-4;
    int max_halvings = 30;
    double damp_initial = 1.0;
    double damp_growth = 1.2;
    bool continuation_fallback = true;
};

}  // namespace fvrb
