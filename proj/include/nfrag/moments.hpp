// Moment evaluation and the explicit bound checks attached to a trajectory.

#ifndef NFRAG_MOMENTS_HPP_
#define NFRAG_MOMENTS_HPP_

#include <string>
#include <vector>

#include "nfrag/grid.hpp"
#include "nfrag/state.hpp"

namespace nfrag {

/// mu_m = sum_k x_k^m g_k, evaluated at the pivots.  Negative and fractional
/// orders are well defined because every pivot is strictly positive.
double moment(const Grid& grid, const State& state, double m);

/// Moment values recorded at every accepted solver step.
class MomentSeries {
  public:
    MomentSeries() = default;
    explicit MomentSeries(std::vector<double> orders) : orders_(std::move(orders)) {}

    const std::vector<double>& orders() const { return orders_; }
    const std::vector<double>& times() const { return times_; }
    std::size_t rows() const { return times_.size(); }

    bool has_order(double m) const;
    int order_index(double m) const;  // throws when missing

    double value(std::size_t row, double m) const;
    std::vector<double> column(double m) const;

    void append(double t, const std::vector<double>& values);

    /// rho = mu_1 at the first recorded time.
    double rho() const;

  private:
    std::vector<double> orders_;
    std::vector<double> times_;
    std::vector<double> values_;  // row-major, rows() x orders().size()
};

/// Outcome of one bound or identity check along a trajectory.
struct BoundReport {
    std::string name;
    std::string identity;  // the inequality or identity being checked
    double tolerance = 0.0;
    double max_violation = 0.0;  // <= tolerance means pass
    double bound_extreme = 0.0;
    double observed_extreme = 0.0;
    bool pass = false;
    std::vector<double> times;     // optional sampled series
    std::vector<double> bound;
    std::vector<double> observed;
    std::string note;
};

/// Horizon T for the zeroth-moment envelope: finite iff sigma in [0,1) and
/// gamma > 2, in which case it equals mu0_in^{sigma-1} / (kappa (1-sigma)
/// (gamma-2) rho^sigma); infinite otherwise.
double t_star(double mu0_in, double rho, double kappa, double sigma, double gamma);

/// Upper envelope for mu_0(t).  gamma = 2 yields the constant mu0_in; for
/// sigma < 1 and gamma > 2 the bound diverges at t_star and larger times throw.
double mu0_envelope(double t, double mu0_in, double rho, double kappa, double sigma,
                    double gamma);

/// Second-order finite-difference derivative on a nonuniform time series.
/// Endpoints use one-sided stencils.
std::vector<double> fd_derivative(const std::vector<double>& t,
                                  const std::vector<double>& f);

// --- trajectory checks -----------------------------------------------------

BoundReport check_mass_conservation(const MomentSeries& series, double tol);

BoundReport check_mu0_monotone(const MomentSeries& series, double slack);

/// mu_0(t) >= mu_0(0) / 2; holds with margin whenever N >= 2.
BoundReport check_mu0_lower_half(const MomentSeries& series);

BoundReport check_mu0_envelope(const MomentSeries& series, double kappa, double sigma,
                               double gamma, double rel_slack);

BoundReport check_mu_sigma1_monotone(const MomentSeries& series, double sigma1,
                                     double slack);

/// d(mu_m)/dt <= kappa varsigma_m [mu_{1+s1} mu_{m+s2-1} + mu_{1+s2} mu_{m+s1-1}]
///             - kappa kappa_m mu_{m+s2} mu_{s1}, finite differences on the left.
BoundReport check_superlinear_inequality(const MomentSeries& series, double m,
                                         double sigma1, double sigma2, double kappa,
                                         double kappa_m, double varsigma_m, double tol);

/// Fits the smallest C with mu_m(t) <= C (1 + 1/t)^{(m-1)/sigma2} and passes
/// iff C is finite.
BoundReport check_superlinear_envelope_shape(const MomentSeries& series, double m,
                                             double sigma2);

/// mu_{-alpha}(t) <= [1 + mu_{-alpha}(0)] e^{2 c T / (1+alpha)} with the
/// explicit constant c built from kappa, L_{-alpha}, the mu_0 envelope and rho.
BoundReport check_neg_alpha_envelope(const MomentSeries& series, double alpha,
                                     double kappa, double L_neg_alpha, double sigma1,
                                     double sigma2, double gamma, double horizon);

/// Companion lower bound mu_{sigma1}(t) >= Pi12^{-s1/a} (mu_0(0)/2)^{(a+s1)/a}.
BoundReport check_mu_sigma1_lower(const MomentSeries& series, double alpha,
                                  double kappa, double L_neg_alpha, double sigma1,
                                  double sigma2, double gamma, double horizon);

/// ||g(t) - g(s)||_0 <= kappa (gamma+2) (Pi1 + rho)^2 |t - s| between
/// consecutive recorded states.
BoundReport check_time_lipschitz(const std::vector<double>& times,
                                 const std::vector<double>& l1_number_diffs,
                                 double kappa, double gamma, double pi1, double rho);

}  // namespace nfrag

#endif  // NFRAG_MOMENTS_HPP_
