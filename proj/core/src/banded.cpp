#include "voz/banded.hpp"

#include <cmath>
#include <stdexcept>

namespace voz {

void BandedSPDMatrix::add(std::size_t i, std::size_t j, double v) {
    if (i < j) std::swap(i, j);
    const std::size_t diag = i - j;
    if (diag > bw_ || i >= n_) throw std::logic_error("BandedSPDMatrix: entry outside band");
    at(diag, j) += v;
}

std::vector<double> solve_banded_spd(BandedSPDMatrix a, std::vector<double> b) {
    const std::size_t n = a.size();
    const std::size_t bw = a.bandwidth();
    if (b.size() != n) throw std::logic_error("solve_banded_spd: size mismatch");

    // In-place banded Cholesky A = L L^T (L stored over A's band).
    for (std::size_t j = 0; j < n; ++j) {
        double d = a.at(0, j);
        const std::size_t k0 = j > bw ? j - bw : 0;
        for (std::size_t k = k0; k < j; ++k) {
            const double ljk = a.at(j - k, k);
            d -= ljk * ljk;
        }
        if (!(d > 0.0)) throw std::logic_error("solve_banded_spd: matrix not positive definite");
        const double ljj = std::sqrt(d);
        a.at(0, j) = ljj;

        const std::size_t imax = std::min(j + bw, n - 1);
        for (std::size_t i = j + 1; i <= imax; ++i) {
            double s = a.at(i - j, j);
            const std::size_t m0 = i > bw ? i - bw : 0;
            for (std::size_t k = std::max(m0, k0); k < j; ++k)
                s -= a.at(i - k, k) * a.at(j - k, k);
            a.at(i - j, j) = s / ljj;
        }
    }

    // forward substitution L y = b
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        const std::size_t k0 = i > bw ? i - bw : 0;
        for (std::size_t k = k0; k < i; ++k) s -= a.at(i - k, k) * b[k];
        b[i] = s / a.at(0, i);
    }

    // back substitution L^T x = y
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        const std::size_t kmax = std::min(i + bw, n - 1);
        for (std::size_t k = i + 1; k <= kmax; ++k) s -= a.at(k - i, i) * b[k];
        b[i] = s / a.at(0, i);
    }
    return b;
}

}  // namespace voz
