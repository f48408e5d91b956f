// Independent ground truth: a closed moment ODE hierarchy for constant
// collision kernels, and fine-grid reference runs for convergence studies.

#ifndef NFRAG_ORACLE_HPP_
#define NFRAG_ORACLE_HPP_

#include <vector>

#include "nfrag/config.hpp"
#include "nfrag/solver.hpp"

namespace nfrag {

/// For sigma1 = sigma2 = 0 the collision rate is the constant 2 kappa and the
/// integer moments close:
///   d mu_m/dt = kappa [ (nu+2)/(m+nu+1) sum_j C(m,j) mu_j mu_{m-j} - 2 mu_m mu_0 ].
/// The m = 1 line vanishes identically (mass conservation).
struct MomentHierarchy {
    double nu = 0.0;
    double kappa = 1.0;
    int max_order = 3;
    std::vector<double> initial;  // size max_order + 1: mu_0 ... mu_M

    static MomentHierarchy make(double nu, double kappa, std::vector<double> initial);

    double gamma() const { return (nu + 2.0) / (nu + 1.0); }
};

/// Right-hand side of the hierarchy at the given moment vector.
std::vector<double> moment_ode_rhs(const MomentHierarchy& h,
                                   const std::vector<double>& moments);

/// Moments at time t via adaptive Dormand-Prince 5(4) at relative tolerance
/// 1e-10.  Requires t < 1/(kappa (gamma-2) mu_0(0)) when gamma > 2.
std::vector<double> solve_hierarchy(const MomentHierarchy& h, double t);

/// mu_0 of the hierarchy in closed form: mu_0(0) / (1 - kappa (gamma-2) mu_0(0) t).
double hierarchy_mu0_closed_form(const MomentHierarchy& h, double t);

/// Same scheme on a grid with factor x cells at a tenth of the step
/// tolerance; the reference for convergence studies.  Throws BudgetError when
/// the configured wall budget is exhausted.
RunResult fine_reference(const SimConfig& config, int refinement_factor);

}  // namespace nfrag

#endif  // NFRAG_ORACLE_HPP_
