#include "nfrag/kernels.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nfrag {

namespace {

void require_size(double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0)
        throw std::invalid_argument(std::string(name) + " must be a finite positive size");
}

double quad_01(const std::function<double(double)>& f, double a, double b) {
    // tanh-sinh handles the z^nu endpoint singularity of the built-in kernels
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(f, a, b, 1e-12);
}

}  // namespace

CollisionKernel CollisionKernel::checked(double kappa, double sigma1, double sigma2) {
    if (!std::isfinite(kappa) || kappa < 0.0)
        throw std::invalid_argument("kappa must be finite and nonnegative");
    if (!std::isfinite(sigma1) || sigma1 < 0.0 || sigma1 >= 1.0)
        throw std::invalid_argument("sigma1 must lie in [0,1) (sigma1 = 1 excluded)");
    if (!std::isfinite(sigma2) || sigma2 < sigma1 || sigma2 > 1.0)
        throw std::invalid_argument("sigma2 must lie in [sigma1, 1]");
    return CollisionKernel{kappa, sigma1, sigma2};
}

double CollisionKernel::rate(double x, double y) const {
    require_size(x, "x");
    require_size(y, "y");
    if (sigma1 == 0.0 && sigma2 == 0.0) return 2.0 * kappa;
    return kappa * (std::pow(x, sigma1) * std::pow(y, sigma2) +
                    std::pow(y, sigma1) * std::pow(x, sigma2));
}

double CollisionKernel::rate_truncated(double n, double x, double y) const {
    if (!std::isfinite(n) || n <= 0.0)
        throw std::invalid_argument("truncation size n must be finite and positive");
    require_size(x, "x");
    require_size(y, "y");
    return x + y < n ? rate(x, y) : 0.0;
}

KernelSandwich gravitational_kernel_sandwich(double x, double y) {
    require_size(x, "x");
    require_size(y, "y");
    const double value =
        std::sqrt(x * y) * std::sqrt(x + y) * (std::cbrt(x) + std::cbrt(y));
    const double phi1 = std::pow(x, 0.5) * std::pow(y, 4.0 / 3.0) +
                        std::pow(x, 4.0 / 3.0) * std::pow(y, 0.5);
    const double phi2 = std::pow(x, 5.0 / 6.0) * y + x * std::pow(y, 5.0 / 6.0);
    const double upper = phi1 + phi2;
    return KernelSandwich{upper / std::sqrt(2.0), value, upper};
}

namespace {

void require_nu(double nu) {
    if (!std::isfinite(nu) || nu <= -1.0 || nu > 0.0)
        throw std::invalid_argument("nu must lie in (-1, 0]");
}

void require_alpha(double alpha, double nu) {
    if (!std::isfinite(alpha) || alpha <= 0.0 || alpha >= nu + 1.0)
        throw std::invalid_argument("alpha must lie in (0, nu+1)");
}

// one no-transfer branch: fragments of a parent of size p, density
// (nu+2) z^nu p^{-nu-1} on (0, p)
BreakageKernel::CellIntegral branch_integral(double nu, double p, double a, double b) {
    const double lo = std::min(a, p);
    const double hi = std::min(b, p);
    if (!(lo < hi)) return {};
    const double scale = std::pow(p, -nu - 1.0);
    return {(nu + 2.0) / (nu + 1.0) * (std::pow(hi, nu + 1.0) - std::pow(lo, nu + 1.0)) * scale,
            (std::pow(hi, nu + 2.0) - std::pow(lo, nu + 2.0)) * scale};
}

}  // namespace

BreakageKernel BreakageKernel::power_law(double nu, double alpha) {
    require_nu(nu);
    require_alpha(alpha, nu);
    BreakageKernel k;
    k.kind_ = Kind::PowerLaw;
    k.nu_ = nu;
    k.alpha_ = alpha;
    k.gamma_ = (nu + 2.0) / (nu + 1.0);
    return k;
}

BreakageKernel BreakageKernel::no_transfer(double nu, double alpha) {
    require_nu(nu);
    require_alpha(alpha, nu);
    BreakageKernel k;
    k.kind_ = Kind::NoTransfer;
    k.nu_ = nu;
    k.alpha_ = alpha;
    k.gamma_ = 2.0 * (nu + 2.0) / (nu + 1.0);
    return k;
}

BreakageKernel BreakageKernel::custom(DensityFn density, double gamma, double alpha,
                                      CellIntegralFn integrals) {
    if (!density) throw std::invalid_argument("custom kernel needs a density callback");
    if (!std::isfinite(gamma) || gamma < 2.0)
        throw std::invalid_argument("declared gamma must be >= 2");
    if (!std::isfinite(alpha) || alpha <= 0.0 || alpha >= 1.0)
        throw std::invalid_argument("declared alpha must lie in (0, 1)");
    BreakageKernel k;
    k.kind_ = Kind::Custom;
    k.alpha_ = alpha;
    k.gamma_ = gamma;
    k.density_ = std::move(density);
    k.integrals_ = std::move(integrals);

    // verify the declared constants on a log-spaced sample grid
    const double sample[] = {1e-3, 5e-2, 1.0, 20.0};
    const double tol = 1e-6;
    for (double x : sample) {
        for (double y : sample) {
            if (y < x) continue;
            const double s = x + y;
            const double n = k.cell_integrals(0.0, s, x, y).number;
            const double m = k.cell_integrals(0.0, s, x, y).mass;
            std::ostringstream at;
            at << " at (x,y) = (" << x << ", " << y << ")";
            if (std::abs(m - s) > tol * s)
                throw std::invalid_argument(
                    "custom kernel violates local mass conservation" + at.str());
            if (n < 2.0 - tol || n > gamma * (1.0 + tol))
                throw std::invalid_argument(
                    "custom kernel daughter count outside [2, gamma]" + at.str());
            for (double z : {0.3 * s, 0.9 * s}) {
                const double d1 = k.density_(z, x, y);
                const double d2 = k.density_(z, y, x);
                if (std::abs(d1 - d2) > tol * (1.0 + std::abs(d1)))
                    throw std::invalid_argument("custom kernel is not symmetric in (x,y)" + at.str());
            }
            if (k.density_(s * (1.0 + 1e-9), x, y) != 0.0)
                throw std::invalid_argument(
                    "custom kernel has fragments above x + y" + at.str());
        }
    }
    return k;
}

double BreakageKernel::density(double z, double x, double y) const {
    require_size(z, "z");
    require_size(x, "x");
    require_size(y, "y");
    switch (kind_) {
        case Kind::PowerLaw: {
            const double s = x + y;
            if (z >= s) return 0.0;
            return (nu_ + 2.0) * std::pow(z, nu_) * std::pow(s, -nu_ - 1.0);
        }
        case Kind::NoTransfer: {
            double d = 0.0;
            if (z < x) d += (nu_ + 2.0) * std::pow(z, nu_) * std::pow(x, -nu_ - 1.0);
            if (z < y) d += (nu_ + 2.0) * std::pow(z, nu_) * std::pow(y, -nu_ - 1.0);
            return d;
        }
        case Kind::Custom:
            return density_(z, x, y);
    }
    return 0.0;
}

double BreakageKernel::moment(double m, double x, double y) const {
    require_size(x, "x");
    require_size(y, "y");
    switch (kind_) {
        case Kind::PowerLaw:
            if (m + nu_ + 1.0 <= 0.0)
                throw std::invalid_argument("moment integral diverges: m + nu + 1 <= 0");
            return (nu_ + 2.0) * std::pow(x + y, m) / (m + nu_ + 1.0);
        case Kind::NoTransfer:
            if (m + nu_ + 1.0 <= 0.0)
                throw std::invalid_argument("moment integral diverges: m + nu + 1 <= 0");
            return (nu_ + 2.0) * (std::pow(x, m) + std::pow(y, m)) / (m + nu_ + 1.0);
        case Kind::Custom: {
            const double s = x + y;
            return quad_01([&](double z) { return std::pow(z, m) * density_(z, x, y); },
                           0.0, s);
        }
    }
    return 0.0;
}

BreakageKernel::CellIntegral BreakageKernel::cell_integrals(double a, double b, double x,
                                                            double y) const {
    if (!(a >= 0.0) || !(b > a))
        throw std::invalid_argument("cell integral needs 0 <= a < b");
    require_size(x, "x");
    require_size(y, "y");
    const double s = x + y;
    switch (kind_) {
        case Kind::PowerLaw: {
            const double lo = std::min(a, s);
            const double hi = std::min(b, s);
            if (!(lo < hi)) return {};
            const double scale = std::pow(s, -nu_ - 1.0);
            return {(nu_ + 2.0) / (nu_ + 1.0) *
                        (std::pow(hi, nu_ + 1.0) - std::pow(lo, nu_ + 1.0)) * scale,
                    (std::pow(hi, nu_ + 2.0) - std::pow(lo, nu_ + 2.0)) * scale};
        }
        case Kind::NoTransfer: {
            const CellIntegral cx = branch_integral(nu_, x, a, b);
            const CellIntegral cy = branch_integral(nu_, y, a, b);
            return {cx.number + cy.number, cx.mass + cy.mass};
        }
        case Kind::Custom: {
            if (integrals_) return integrals_(a, b, x, y);
            const double hi = std::min(b, s);
            if (!(a < hi)) return {};
            return {quad_01([&](double z) { return density_(z, x, y); }, a, hi),
                    quad_01([&](double z) { return z * density_(z, x, y); }, a, hi)};
        }
    }
    return {};
}

KernelConstants constants_power_law(double nu, double m, double sigma1, double alpha,
                                    double p) {
    require_nu(nu);
    KernelConstants c;
    c.nu = nu;
    c.gamma = (nu + 2.0) / (nu + 1.0);

    if (std::isfinite(m)) {
        if (m <= 1.0) throw std::invalid_argument("m must be > 1");
        c.m = m;
        c.kappa_m = (m - 1.0) / (m + nu + 1.0);
        c.C_m = (m > 2.0 && m < 3.0) ? m : std::pow(2.0, m - 1.0) - 1.0;
        c.varsigma_m = c.C_m * (nu + 2.0) / (m + nu + 1.0);
    }
    if (std::isfinite(sigma1)) {
        if (sigma1 <= 0.0 || sigma1 >= 1.0)
            throw std::invalid_argument("sigma1 must lie in (0, 1) for l and nu thresholds");
        c.sigma1 = sigma1;
        c.l_sigma1 = std::pow(2.0, sigma1 - 1.0) * (nu + 2.0) / (sigma1 + nu + 1.0);
        c.nu_sigma1 = -(1.0 + sigma1 - std::pow(2.0, sigma1)) /
                      (1.0 - std::pow(2.0, sigma1 - 1.0));
    }
    if (std::isfinite(alpha)) {
        require_alpha(alpha, nu);
        c.alpha = alpha;
        c.L_neg_alpha = (nu + 2.0) / (nu + 1.0 - alpha);
    }
    if (std::isfinite(p)) {
        if (p <= 1.0 / (nu + 1.0))
            throw std::invalid_argument("p must exceed 1/(nu+1)");
        c.p = p;
        c.eta_coefficient =
            (nu + 2.0) * std::pow((p - 1.0) / (p * (nu + 1.0) - 1.0), (p - 1.0) / p);
        c.eta_exponent = 1.0 / p;
    }
    return c;
}

}  // namespace nfrag
