// Solution state on a sectional grid and the supported initial data families.

#ifndef NFRAG_STATE_HPP_
#define NFRAG_STATE_HPP_

#include <string>
#include <utility>
#include <vector>

#include "nfrag/grid.hpp"

namespace nfrag {

/// Cell-averaged number density at one instant.  g_k = density[k] * width_k
/// is the particle number in cell k.
struct State {
    double time = 0.0;
    std::vector<double> density;

    double cell_number(const Grid& grid, int k) const {
        return density[k] * grid.widths[k];
    }
};

/// States sampled at the configured output cadence.
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
};

/// Analytic moments of the untruncated initial density, for validation.
struct InitialMoments {
    double mu0 = 0.0;
    double mu1 = 0.0;
    double mu2 = 0.0;
};

class InitialCondition {
  public:
    enum class Family { Exponential, Pulse, Tabulated };

    /// u(x) = amplitude * exp(-x / x0).
    static InitialCondition exponential(double amplitude, double x0);

    /// u(x) = height on [a, b], zero elsewhere.
    static InitialCondition pulse(double a, double b, double height);

    /// Piecewise-linear density through (x, u) samples, zero outside their span.
    static InitialCondition tabulated(std::vector<std::pair<double, double>> samples);

    Family family() const { return family_; }

    double density(double x) const;

    /// Exact integral of the density over [a, b].
    double integral(double a, double b) const;

    InitialMoments analytic_moments() const;

  private:
    InitialCondition() = default;

    Family family_ = Family::Exponential;
    double amplitude_ = 1.0, x0_ = 1.0;        // exponential
    double a_ = 0.0, b_ = 0.0, height_ = 0.0;  // pulse
    std::vector<std::pair<double, double>> samples_;
};

/// Cell averages of the initial density over the grid; the part of the
/// density beyond the truncation size n is dropped.
State build_initial_state(const InitialCondition& init, const Grid& grid);

}  // namespace nfrag

#endif  // NFRAG_STATE_HPP_
