#include "nfrag/state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nfrag {

InitialCondition InitialCondition::exponential(double amplitude, double x0) {
    if (!std::isfinite(amplitude) || amplitude <= 0.0)
        throw std::invalid_argument("exponential amplitude must be positive");
    if (!std::isfinite(x0) || x0 <= 0.0)
        throw std::invalid_argument("exponential x0 must be positive");
    InitialCondition c;
    c.family_ = Family::Exponential;
    c.amplitude_ = amplitude;
    c.x0_ = x0;
    return c;
}

InitialCondition InitialCondition::pulse(double a, double b, double height) {
    if (!std::isfinite(a) || !std::isfinite(b) || a < 0.0 || b <= a)
        throw std::invalid_argument("pulse needs 0 <= a < b");
    if (!std::isfinite(height) || height <= 0.0)
        throw std::invalid_argument("pulse height must be positive");
    InitialCondition c;
    c.family_ = Family::Pulse;
    c.a_ = a;
    c.b_ = b;
    c.height_ = height;
    return c;
}

InitialCondition InitialCondition::tabulated(std::vector<std::pair<double, double>> samples) {
    if (samples.size() < 2) throw std::invalid_argument("tabulated density needs >= 2 samples");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& [x, u] = samples[i];
        if (!std::isfinite(x) || x <= 0.0)
            throw std::invalid_argument("tabulated sizes must be positive");
        if (!std::isfinite(u) || u < 0.0)
            throw std::invalid_argument("tabulated density must be nonnegative");
        if (i > 0 && x <= samples[i - 1].first)
            throw std::invalid_argument("tabulated sizes must be strictly increasing");
    }
    InitialCondition c;
    c.family_ = Family::Tabulated;
    c.samples_ = std::move(samples);
    return c;
}

double InitialCondition::density(double x) const {
    switch (family_) {
        case Family::Exponential:
            return amplitude_ * std::exp(-x / x0_);
        case Family::Pulse:
            return (x >= a_ && x <= b_) ? height_ : 0.0;
        case Family::Tabulated: {
            if (x <= samples_.front().first || x >= samples_.back().first) {
                if (x == samples_.front().first) return samples_.front().second;
                if (x == samples_.back().first) return samples_.back().second;
                return 0.0;
            }
            const auto it = std::upper_bound(
                samples_.begin(), samples_.end(), x,
                [](double v, const auto& s) { return v < s.first; });
            const auto& [x1, u1] = *(it - 1);
            const auto& [x2, u2] = *it;
            return u1 + (u2 - u1) * (x - x1) / (x2 - x1);
        }
    }
    return 0.0;
}

double InitialCondition::integral(double a, double b) const {
    if (b <= a) return 0.0;
    switch (family_) {
        case Family::Exponential:
            // x0 (e^{-a/x0} - e^{-b/x0}) without cancellation for thin cells
            return amplitude_ * x0_ * std::exp(-a / x0_) * -std::expm1(-(b - a) / x0_);
        case Family::Pulse: {
            const double lo = std::max(a, a_);
            const double hi = std::min(b, b_);
            return hi > lo ? height_ * (hi - lo) : 0.0;
        }
        case Family::Tabulated: {
            const double lo = std::max(a, samples_.front().first);
            const double hi = std::min(b, samples_.back().first);
            if (hi <= lo) return 0.0;
            double sum = 0.0;
            for (std::size_t i = 0; i + 1 < samples_.size(); ++i) {
                const double s1 = std::max(lo, samples_[i].first);
                const double s2 = std::min(hi, samples_[i + 1].first);
                if (s2 <= s1) continue;
                sum += 0.5 * (density(s1) + density(s2)) * (s2 - s1);
            }
            return sum;
        }
    }
    return 0.0;
}

InitialMoments InitialCondition::analytic_moments() const {
    switch (family_) {
        case Family::Exponential:
            return {amplitude_ * x0_, amplitude_ * x0_ * x0_,
                    2.0 * amplitude_ * x0_ * x0_ * x0_};
        case Family::Pulse:
            return {height_ * (b_ - a_), height_ * (b_ * b_ - a_ * a_) / 2.0,
                    height_ * (b_ * b_ * b_ - a_ * a_ * a_) / 3.0};
        case Family::Tabulated: {
            InitialMoments m;
            // exact moments of the piecewise-linear interpolant
            for (std::size_t i = 0; i + 1 < samples_.size(); ++i) {
                const auto& [x1, u1] = samples_[i];
                const auto& [x2, u2] = samples_[i + 1];
                const double h = x2 - x1;
                m.mu0 += 0.5 * (u1 + u2) * h;
                m.mu1 += h * (u1 * (2.0 * x1 + x2) + u2 * (x1 + 2.0 * x2)) / 6.0;
                m.mu2 += h *
                         (u1 * (3.0 * x1 * x1 + 2.0 * x1 * x2 + x2 * x2) +
                          u2 * (x1 * x1 + 2.0 * x1 * x2 + 3.0 * x2 * x2)) /
                         12.0;
            }
            return m;
        }
    }
    return {};
}

State build_initial_state(const InitialCondition& init, const Grid& grid) {
    State s;
    s.time = 0.0;
    s.density.resize(grid.size());
    for (int k = 0; k < grid.size(); ++k)
        s.density[k] = init.integral(grid.edges[k], grid.edges[k + 1]) / grid.widths[k];
    return s;
}

}  // namespace nfrag
