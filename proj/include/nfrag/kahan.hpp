#ifndef NFRAG_KAHAN_HPP_
#define NFRAG_KAHAN_HPP_

namespace nfrag {

/// Compensated accumulator.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

}  // namespace nfrag

#endif  // NFRAG_KAHAN_HPP_
