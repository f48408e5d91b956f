#include "nfrag/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nfrag {

Grid Grid::geometric(double e1, double n, int cells) {
    if (!std::isfinite(e1) || !std::isfinite(n) || e1 <= 0.0 || e1 >= n)
        throw std::invalid_argument("grid needs 0 < e1 < n");
    if (cells < 2) throw std::invalid_argument("grid needs at least 2 geometric cells");

    Grid g;
    const int k_total = cells + 1;
    g.edges.resize(k_total + 1);
    g.edges[0] = 0.0;
    const double step = std::log(n / e1) / cells;
    for (int k = 0; k < cells; ++k) g.edges[k + 1] = e1 * std::exp(k * step);
    g.edges[k_total] = n;
    g.truncation = n;

    g.pivots.resize(k_total);
    g.widths.resize(k_total);
    g.pivots[0] = 0.5 * e1;  // mass centroid of a uniform fragment density on (0, e1)
    for (int k = 1; k < k_total; ++k) g.pivots[k] = std::sqrt(g.edges[k] * g.edges[k + 1]);
    for (int k = 0; k < k_total; ++k) g.widths[k] = g.edges[k + 1] - g.edges[k];
    return g;
}

int Grid::locate(double z) const {
    if (!std::isfinite(z) || z <= 0.0 || z > truncation)
        throw std::invalid_argument("size outside (0, n]");
    const auto it = std::upper_bound(edges.begin(), edges.end(), z);
    const int idx = static_cast<int>(it - edges.begin()) - 1;
    return std::min(idx, size() - 1);
}

double AllocationTable::rate(int i, int j) const {
    const int k = grid_.size();
    if (i < 0 || j < 0 || i >= k || j >= k) throw std::out_of_range("cell index");
    if (i > j) std::swap(i, j);
    const int idx = pair_index_[static_cast<std::size_t>(i) * k + j];
    return idx < 0 ? 0.0 : pairs_[idx].rate;
}

double AllocationTable::max_abs_upsilon(const std::vector<double>& theta) const {
    double worst = 0.0;
    for (const auto& p : pairs_) {
        const double* w = weights_.data() + p.offset;
        double s = 0.0, c = 0.0;
        for (int k = 0; k < p.count; ++k) {
            const double y = theta[k] * w[k] - c;
            const double t = s + y;
            c = (t - s) - y;
            s = t;
        }
        worst = std::max(worst, std::abs(s - theta[p.i] - theta[p.j]));
    }
    return worst;
}

std::pair<double, double> AllocationTable::allocation_sums(const Pair& p) const {
    double num = 0.0, cn = 0.0, mass = 0.0, cm = 0.0;
    const double* w = weights_.data() + p.offset;
    const double* x = grid_.pivots.data();
    for (int k = 0; k < p.count; ++k) {
        double y = w[k] - cn;
        double t = num + y;
        cn = (t - num) - y;
        num = t;
        y = x[k] * w[k] - cm;
        t = mass + y;
        cm = (t - mass) - y;
        mass = t;
    }
    return {num, mass};
}

namespace {

// Adds the two-point redistribution of the fragment distribution described
// by `seg` over (0, upper) into w.  seg(k) must return the (number, mass)
// integral over [pivot_k, min(pivot_{k+1}, upper)], seg(-1) the integral
// over (0, pivot_0), and seg(K-1) the integral over [pivot_{K-1}, upper]
// when upper exceeds the last pivot.  Returns the signed number defect from
// the nearest-pivot assignment outside the pivot span.
template <class SegFn>
double add_two_point_weights(const std::vector<double>& pivots, double upper, SegFn&& seg,
                             double* w) {
    const int k_cells = static_cast<int>(pivots.size());
    double defect = 0.0;

    // below the first pivot: mass-preserving weight on pivot 0
    {
        const auto ci = seg(-1);
        w[0] += ci.mass / pivots[0];
        defect += ci.number - ci.mass / pivots[0];
    }

    const int u = static_cast<int>(std::lower_bound(pivots.begin(), pivots.end(), upper) -
                                   pivots.begin());
    const int last_full = std::min(u, k_cells) - 1;
    for (int k = 0; k < last_full; ++k) {
        const auto ci = seg(k);
        const double width = pivots[k + 1] - pivots[k];
        w[k] += (pivots[k + 1] * ci.number - ci.mass) / width;
        w[k + 1] += (ci.mass - pivots[k] * ci.number) / width;
    }
    if (u < k_cells) {
        // partial segment [pivot_{u-1}, upper], split between pivots u-1 and u
        if (u >= 1) {
            const auto ci = seg(u - 1);
            const double width = pivots[u] - pivots[u - 1];
            w[u - 1] += (pivots[u] * ci.number - ci.mass) / width;
            w[u] += (ci.mass - pivots[u - 1] * ci.number) / width;
        }
    } else {
        // above the last pivot: mass-preserving weight on the last pivot
        const auto ci = seg(k_cells - 1);
        w[k_cells - 1] += ci.mass / pivots[k_cells - 1];
        defect += ci.number - ci.mass / pivots[k_cells - 1];
    }
    return defect;
}

int destination_count(const std::vector<double>& pivots, double upper) {
    const int u = static_cast<int>(std::lower_bound(pivots.begin(), pivots.end(), upper) -
                                   pivots.begin());
    return std::min(u + 1, static_cast<int>(pivots.size()));
}

std::vector<double> pivot_powers(const std::vector<double>& pivots, double e) {
    std::vector<double> p(pivots.size());
    for (std::size_t k = 0; k < pivots.size(); ++k) p[k] = std::pow(pivots[k], e);
    return p;
}

}  // namespace

AllocationTable build_allocation_table(const Grid& grid, const CollisionKernel& collision,
                                       const BreakageKernel& breakage) {
    const int k_cells = grid.size();
    const auto& x = grid.pivots;
    const double n = grid.truncation;

    AllocationTable table;
    table.grid_ = grid;
    table.pair_index_.assign(static_cast<std::size_t>(k_cells) * k_cells, -1);

    const auto ps1 = pivot_powers(x, collision.sigma1);
    const auto ps2 = pivot_powers(x, collision.sigma2);

    // pass 1: admissible pairs and weight storage
    std::size_t total = 0;
    for (int i = 0; i < k_cells; ++i) {
        for (int j = i; j < k_cells; ++j) {
            const double s = x[i] + x[j];
            if (s >= n) continue;
            AllocationTable::Pair p;
            p.i = i;
            p.j = j;
            p.rate = collision.kappa * (ps1[i] * ps2[j] + ps1[j] * ps2[i]);
            p.offset = total;
            p.count = destination_count(x, s);
            total += p.count;
            table.pair_index_[static_cast<std::size_t>(i) * k_cells + j] =
                static_cast<int>(table.pairs_.size());
            table.pairs_.push_back(p);
        }
    }
    table.weights_.assign(total, 0.0);

    // pass 2: fragment weights
    const bool power_law = breakage.kind() == BreakageKernel::Kind::PowerLaw;
    std::vector<double> piv_pow_n1, piv_pow_n2;
    double c1 = 0.0;
    if (power_law) {
        const double nu = breakage.nu();
        piv_pow_n1 = pivot_powers(x, nu + 1.0);
        piv_pow_n2 = pivot_powers(x, nu + 2.0);
        c1 = (nu + 2.0) / (nu + 1.0);
    }
    for (auto& p : table.pairs_) {
        const double s = x[p.i] + x[p.j];
        double* w = table.weights_.data() + p.offset;
        double defect;
        if (power_law) {
            const double inv = std::pow(s, -breakage.nu() - 1.0);
            auto seg = [&](int k) -> BreakageKernel::CellIntegral {
                const double a1 = k < 0 ? 0.0 : piv_pow_n1[k] * inv;
                const double a2 = k < 0 ? 0.0 : piv_pow_n2[k] * inv;
                const bool ends_at_s = k + 1 >= k_cells || x[k + 1] >= s;
                const double b1 = ends_at_s ? 1.0 : piv_pow_n1[k + 1] * inv;
                const double b2 = ends_at_s ? s : piv_pow_n2[k + 1] * inv;
                return {c1 * (b1 - a1), b2 - a2};
            };
            defect = add_two_point_weights(x, s, seg, w);
        } else {
            auto seg = [&](int k) -> BreakageKernel::CellIntegral {
                const double a = k < 0 ? 0.0 : x[k];
                const double b = (k + 1 >= k_cells || x[k + 1] >= s) ? s : x[k + 1];
                if (!(a < b)) return {};
                return breakage.cell_integrals(a, b, x[p.i], x[p.j]);
            };
            defect = add_two_point_weights(x, s, seg, w);
        }
        p.number_defect = defect;
        table.max_number_defect_ = std::max(table.max_number_defect_, std::abs(defect));
    }
    return table;
}

AllocationTable build_no_transfer_table_direct(const Grid& grid,
                                               const CollisionKernel& collision, double nu,
                                               double alpha) {
    // reuse the admissibility checks of the combined kernel
    (void)BreakageKernel::no_transfer(nu, alpha);

    const int k_cells = grid.size();
    const auto& x = grid.pivots;
    const double n = grid.truncation;

    AllocationTable table;
    table.grid_ = grid;
    table.pair_index_.assign(static_cast<std::size_t>(k_cells) * k_cells, -1);

    const auto ps1 = pivot_powers(x, collision.sigma1);
    const auto ps2 = pivot_powers(x, collision.sigma2);
    const auto piv_pow_n1 = pivot_powers(x, nu + 1.0);
    const auto piv_pow_n2 = pivot_powers(x, nu + 2.0);
    const double c1 = (nu + 2.0) / (nu + 1.0);

    std::size_t total = 0;
    for (int i = 0; i < k_cells; ++i) {
        for (int j = i; j < k_cells; ++j) {
            const double s = x[i] + x[j];
            if (s >= n) continue;
            AllocationTable::Pair p;
            p.i = i;
            p.j = j;
            p.rate = collision.kappa * (ps1[i] * ps2[j] + ps1[j] * ps2[i]);
            p.offset = total;
            // fragments of either parent never exceed the larger pivot
            p.count = destination_count(x, x[j]);
            total += p.count;
            table.pair_index_[static_cast<std::size_t>(i) * k_cells + j] =
                static_cast<int>(table.pairs_.size());
            table.pairs_.push_back(p);
        }
    }
    table.weights_.assign(total, 0.0);

    for (auto& p : table.pairs_) {
        double* w = table.weights_.data() + p.offset;
        double defect = 0.0;
        for (const int parent : {p.i, p.j}) {
            const double xp = x[parent];
            const double inv = std::pow(xp, -nu - 1.0);
            auto seg = [&](int k) -> BreakageKernel::CellIntegral {
                const double a1 = k < 0 ? 0.0 : piv_pow_n1[k] * inv;
                const double a2 = k < 0 ? 0.0 : piv_pow_n2[k] * inv;
                const bool ends_at_parent = k + 1 >= k_cells || x[k + 1] >= xp;
                const double b1 = ends_at_parent ? 1.0 : piv_pow_n1[k + 1] * inv;
                const double b2 = ends_at_parent ? xp : piv_pow_n2[k + 1] * inv;
                return {c1 * (b1 - a1), b2 - a2};
            };
            defect += add_two_point_weights(x, xp, seg, w);
        }
        p.number_defect = defect;
        table.max_number_defect_ = std::max(table.max_number_defect_, std::abs(defect));
    }
    return table;
}

}  // namespace nfrag
