// Sectional mesh over (0, n] and precomputed pairwise fragment allocation.

#ifndef NFRAG_GRID_HPP_
#define NFRAG_GRID_HPP_

#include <cstddef>
#include <vector>

#include "nfrag/kernels.hpp"

namespace nfrag {

/// Mesh of K cells [e_k, e_{k+1}) with e_0 = 0 and e_K = n.  Cell 0 covers
/// (0, e_1) with pivot e_1/2; interior pivots are geometric means of the
/// cell edges.
struct Grid {
    std::vector<double> edges;   // size K+1, strictly increasing, edges[0] = 0
    std::vector<double> pivots;  // size K, edges[k] < pivots[k] < edges[k+1]
    std::vector<double> widths;  // size K
    double truncation = 0.0;     // n = edges[K]

    /// Geometric mesh: `cells` geometrically spaced cells from e1 to n plus
    /// the prepended cell [0, e1).  Total cell count is cells + 1.
    static Grid geometric(double e1, double n, int cells);

    int size() const { return static_cast<int>(pivots.size()); }

    /// Cell index containing z; z in (0, e_1) maps to 0, z = n to the last cell.
    int locate(double z) const;
};

/// Per-pair collision rates and fragment redistribution weights.
///
/// For every unordered pair (i, j) with x_i + x_j < n the table stores
/// Phi(x_i, x_j) and weights w_k >= 0 giving the number of fragments
/// assigned to pivot k per collision.  Fragments between two pivots are
/// split so that fragment number and mass are both conserved; fragments
/// below the first pivot (and above the last) are assigned to the nearest
/// pivot with mass-preserving weight, and the resulting number defect is
/// accumulated in `max_number_defect`.
class AllocationTable {
  public:
    struct Pair {
        int i = 0;
        int j = 0;
        double rate = 0.0;       // Phi(x_i, x_j), untruncated value
        std::size_t offset = 0;  // into weights(), destinations 0..count-1
        int count = 0;
        double number_defect = 0.0;  // N(x_i,x_j) - sum_k w_k, signed
    };

    const Grid& grid() const { return grid_; }
    const std::vector<Pair>& pairs() const { return pairs_; }
    const std::vector<double>& weights() const { return weights_; }

    /// Phi_n(x_i, x_j): stored rate, or 0 for truncated pairs (x_i + x_j >= n).
    double rate(int i, int j) const;

    /// Largest |sum_k w_k - N(x_i, x_j)| over all pairs, induced by the
    /// nearest-pivot convention outside the pivot span.
    double max_number_defect() const { return max_number_defect_; }

    /// (sum_k w_k, sum_k x_k w_k) for one stored pair.
    std::pair<double, double> allocation_sums(const Pair& p) const;

    /// max over pairs of |sum_k theta_k w_k - theta_i - theta_j| for a test
    /// function tabulated at the pivots.
    double max_abs_upsilon(const std::vector<double>& theta) const;

    friend AllocationTable build_allocation_table(const Grid& grid,
                                                  const CollisionKernel& collision,
                                                  const BreakageKernel& breakage);
    friend AllocationTable build_no_transfer_table_direct(const Grid& grid,
                                                          const CollisionKernel& collision,
                                                          double nu, double alpha);

  private:
    Grid grid_;
    std::vector<Pair> pairs_;
    std::vector<double> weights_;
    std::vector<int> pair_index_;  // K*K lookup, -1 for truncated pairs
    double max_number_defect_ = 0.0;
};

/// Builds the table for an arbitrary breakage kernel via its cell integrals.
AllocationTable build_allocation_table(const Grid& grid, const CollisionKernel& collision,
                                       const BreakageKernel& breakage);

/// Builds the no-transfer table parent by parent: each collider's fragments
/// are integrated and redistributed separately, which realizes the gain term
/// of the equation without mass transfer directly.
AllocationTable build_no_transfer_table_direct(const Grid& grid,
                                               const CollisionKernel& collision, double nu,
                                               double alpha);

}  // namespace nfrag

#endif  // NFRAG_GRID_HPP_
