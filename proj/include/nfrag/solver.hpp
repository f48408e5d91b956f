// Truncated-system right-hand side and time integration.

#ifndef NFRAG_SOLVER_HPP_
#define NFRAG_SOLVER_HPP_

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "nfrag/config.hpp"
#include "nfrag/grid.hpp"
#include "nfrag/moments.hpp"
#include "nfrag/state.hpp"

namespace nfrag {

struct SolverSettings {
    double dt_initial = 1e-4;
    double dt_max = 1e-2;
    double safety = 0.9;
    double rel_tol = 1e-8;
    double positivity_floor = 0.0;  // densities below this count as unoccupied
    double loss_dt_cap = 0.5;       // dt <= cap / max_k(loss rate)
    double end_time = 1.0;
    double fixed_dt = 0.0;  // > 0: fixed-step mode, no error adaptivity
    int output_points = 101;
    int threads = 1;
    bool probe_blowup = false;
    double blowup_factor = 100.0;
    double wall_budget_seconds = 0.0;

    static SolverSettings from_config(const SimConfig& config);
};

class StiffnessError : public std::runtime_error {
  public:
    StiffnessError(double time, double dt);
    double time() const { return time_; }
    double dt() const { return dt_; }

  private:
    double time_, dt_;
};

class BudgetError : public std::runtime_error {
  public:
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

/// Right-hand side evaluated on cell densities.  number_rate holds
/// d(g_k)/dt, density_rate holds number_rate / width_k, and max_loss_rate the
/// largest per-cell relative loss rate over occupied cells.
class RhsFunction {
  public:
    virtual ~RhsFunction() = default;
    virtual int cells() const = 0;
    virtual void eval(const std::vector<double>& density, std::vector<double>& density_rate,
                      std::vector<double>& number_rate, double& max_loss_rate) const = 0;
};

/// Bilinear collision rhs over an allocation table.  Pair sums are
/// accumulated in chunks of fixed pair ranges with compensated summation and
/// merged in chunk order, so results are bit-identical for any thread count.
class TableRhs : public RhsFunction {
  public:
    TableRhs(const AllocationTable& table, int threads,
             double positivity_floor = 0.0);
    int cells() const override;
    void eval(const std::vector<double>& density, std::vector<double>& density_rate,
              std::vector<double>& number_rate, double& max_loss_rate) const override;

  private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

/// Observer of the stage number-rates of an accepted step; used to accumulate
/// weak-form time integrals with the same quadrature the update uses.
using StageObserver = std::function<void(
    double dt, const std::vector<double>& l0, const std::vector<double>& l1,
    const std::vector<double>& l2)>;

/// One adaptive strong-stability-preserving RK3 stepper.
class Stepper {
  public:
    Stepper(const RhsFunction& rhs, const SolverSettings& settings);

    /// Advances state by one accepted step, clipped to t_clip.  Rejected
    /// attempts (error test or negativity) shrink dt; dt underflow throws
    /// StiffnessError.  Returns the accepted dt.
    double advance(State& state, double t_clip, const StageObserver& observer = nullptr);

    double current_dt() const { return dt_; }
    long rejected() const { return rejected_; }

  private:
    const RhsFunction& rhs_;
    SolverSettings settings_;
    double dt_;
    double abs_tol_ = 0.0;
    bool abs_tol_set_ = false;
    long rejected_ = 0;
    std::vector<double> l0_, l1_, l2_, n0_, n1_, n2_, u1_, u2_, u3_;
};

enum class RunStatus { Ok, BlowupStop, StiffnessFailure, BudgetExceeded };

/// Kernel data the moment bounds need alongside the table.
struct KernelParams {
    double kappa = 1.0;
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double gamma = 2.0;
    double sigma() const { return sigma1 + sigma2; }
};

struct WeakFormSpec {
    std::string name;
    std::vector<double> theta;  // values at the pivots
    double norm_inf = 1.0;
};

/// Weak-form bookkeeping for one test function: the instantaneous sums
/// sum_k theta_k g_k at the output times and the collision integral
/// accumulated over the same accepted steps.  residual(t) =
/// |sum(t) - sum(0) - integral(t)|.
struct WeakFormSeries {
    std::string name;
    double norm_inf = 1.0;
    double initial_sum = 0.0;
    double max_abs_upsilon = 0.0;  // max over pairs of |sum_k theta_k w_k - theta_i - theta_j|
    std::vector<double> sums;       // at output times
    std::vector<double> integrals;  // at output times
    std::vector<double> residuals() const;
};

struct RunResult {
    Grid grid;
    KernelParams kernel;
    Trajectory trajectory;        // states at the output times
    MomentSeries step_moments;    // recorded at every accepted step
    MomentSeries output_moments;  // the same orders at the output times
    InitialMoments analytic_initial;
    double mu0_initial = 0.0;
    double rho = 0.0;  // mu_1 of the initial state
    double horizon_t_star = 0.0;
    double max_mass_drift = 0.0;  // relative, over accepted steps
    double min_density = 0.0;
    double max_number_defect = 0.0;
    std::vector<double> lipschitz_l1_diffs;  // per output interval
    std::vector<WeakFormSeries> weak_forms;
    long steps_accepted = 0;
    long steps_rejected = 0;
    RunStatus status = RunStatus::Ok;
    double stop_time = 0.0;
    std::string status_detail;
    double wall_seconds = 0.0;
};

/// Core integration loop over a prepared table and initial state.
RunResult integrate_core(const AllocationTable& table, const State& initial,
                         const SolverSettings& settings, std::vector<double> moment_orders,
                         const KernelParams& kernel, std::vector<WeakFormSpec> weak_forms);

/// Full run described by a validated configuration.
RunResult integrate(const SimConfig& config);

/// The three standard weak-form test functions: theta = 1, theta = x and the
/// indicator of [1, 2], tabulated at the pivots.
std::vector<WeakFormSpec> standard_weak_forms(const Grid& grid);

}  // namespace nfrag

#endif  // NFRAG_SOLVER_HPP_
