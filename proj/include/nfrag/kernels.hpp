// Collision and breakage kernels for the nonlinear fragmentation solver.

#ifndef NFRAG_KERNELS_HPP_
#define NFRAG_KERNELS_HPP_

#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace nfrag {

/// Product-form collision kernel  Phi(x,y) = kappa (x^s1 y^s2 + y^s1 x^s2).
///
/// Admissible range: kappa >= 0, 0 <= s1 <= s2 <= 1, s1 != 1, so the
/// homogeneity s1 + s2 stays in [0,2).  Aggregate construction is left
/// unchecked for diagnostic use; `checked` enforces the range.
struct CollisionKernel {
    double kappa = 1.0;
    double sigma1 = 0.0;
    double sigma2 = 0.0;

    static CollisionKernel checked(double kappa, double sigma1, double sigma2);

    double homogeneity() const { return sigma1 + sigma2; }

    /// Phi(x,y); throws std::invalid_argument for non-finite or non-positive sizes.
    double rate(double x, double y) const;

    /// Phi_n(x,y): the rate when x + y < n, zero otherwise.
    double rate_truncated(double n, double x, double y) const;
};

/// Gravitational kernel (xy)^{1/2}(x+y)^{1/2}(x^{1/3}+y^{1/3}) together with
/// its product-form bracket: lower = (Phi1+Phi2)/sqrt(2), upper = Phi1+Phi2,
/// Phi1 = x^{1/2}y^{4/3}+x^{4/3}y^{1/2}, Phi2 = x^{5/6}y + x y^{5/6}.
struct KernelSandwich {
    double lower;
    double value;
    double upper;
};

KernelSandwich gravitational_kernel_sandwich(double x, double y);

/// Daughter distribution beta(z,x,y).
///
/// PowerLaw:   (nu+2) z^nu (x+y)^{-nu-1} on (0, x+y), nu in (-1,0].
/// NoTransfer: bbar(z,x,y) 1_{z<x} + bbar(z,y,x) 1_{z<y} with
///             bbar(z,x,y) = (nu+2) z^nu x^{-nu-1}; fragments never exceed
///             their own parent, so collisions transfer no mass.
/// Custom:     user density with declared gamma and alpha; verified by
///             quadrature on a sample grid at construction.
class BreakageKernel {
  public:
    enum class Kind { PowerLaw, NoTransfer, Custom };

    struct CellIntegral {
        double number = 0.0;  // integral of beta over the cell
        double mass = 0.0;    // integral of z beta over the cell
    };

    using DensityFn = std::function<double(double z, double x, double y)>;
    using CellIntegralFn =
        std::function<CellIntegral(double a, double b, double x, double y)>;

    static BreakageKernel power_law(double nu, double alpha);
    static BreakageKernel no_transfer(double nu, double alpha);

    /// Custom kernel; `integrals` may supply closed-form cell integrals,
    /// otherwise adaptive quadrature is used throughout.
    static BreakageKernel custom(DensityFn density, double gamma, double alpha,
                                 CellIntegralFn integrals = nullptr);

    Kind kind() const { return kind_; }
    double nu() const { return nu_; }
    double alpha() const { return alpha_; }

    /// Upper bound on the daughter count N(x,y); exact for the built-in kinds.
    double gamma() const { return gamma_; }

    double density(double z, double x, double y) const;

    /// integral of z^m beta(z,x,y) dz over (0, x+y); throws when divergent.
    double moment(double m, double x, double y) const;

    /// N(x,y) = moment(0, x, y).
    double daughter_count(double x, double y) const { return moment(0.0, x, y); }

    /// (number, mass) of fragments landing in [a, min(b, x+y)); requires a < b.
    CellIntegral cell_integrals(double a, double b, double x, double y) const;

    bool has_closed_form_integrals() const { return kind_ != Kind::Custom || bool(integrals_); }

  private:
    BreakageKernel() = default;

    Kind kind_ = Kind::PowerLaw;
    double nu_ = 0.0;
    double alpha_ = 0.5;
    double gamma_ = 2.0;
    DensityFn density_;       // Custom only
    CellIntegralFn integrals_;  // Custom only, optional
};

/// Closed-form constants attached to the power-law daughter distribution.
/// Fields whose inputs were not supplied (or lie outside their admissible
/// range) are set to NaN.
struct KernelConstants {
    double nu = 0.0;
    double m = std::numeric_limits<double>::quiet_NaN();
    double sigma1 = std::numeric_limits<double>::quiet_NaN();
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double p = std::numeric_limits<double>::quiet_NaN();

    double gamma = std::numeric_limits<double>::quiet_NaN();        // (nu+2)/(nu+1)
    double kappa_m = std::numeric_limits<double>::quiet_NaN();      // (m-1)/(m+nu+1)
    double C_m = std::numeric_limits<double>::quiet_NaN();          // binomial bound constant
    double varsigma_m = std::numeric_limits<double>::quiet_NaN();   // C_m (nu+2)/(m+nu+1)
    double l_sigma1 = std::numeric_limits<double>::quiet_NaN();     // 2^{s1-1}(nu+2)/(s1+nu+1)
    double nu_sigma1 = std::numeric_limits<double>::quiet_NaN();    // -(1+s1-2^{s1})/(1-2^{s1-1})
    double L_neg_alpha = std::numeric_limits<double>::quiet_NaN();  // (nu+2)/(nu+1-alpha)
    double eta_coefficient = std::numeric_limits<double>::quiet_NaN();
    double eta_exponent = std::numeric_limits<double>::quiet_NaN();  // 1/p
};

/// Evaluates every closed-form constant for the power-law kernel beta_nu.
/// m, sigma1, alpha and p are optional (pass NaN to skip the dependent
/// fields); supplied values outside their admissible domain throw.
KernelConstants constants_power_law(
    double nu, double m = std::numeric_limits<double>::quiet_NaN(),
    double sigma1 = std::numeric_limits<double>::quiet_NaN(),
    double alpha = std::numeric_limits<double>::quiet_NaN(),
    double p = std::numeric_limits<double>::quiet_NaN());

}  // namespace nfrag

#endif  // NFRAG_KERNELS_HPP_
