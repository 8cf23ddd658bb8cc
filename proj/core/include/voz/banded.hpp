#pragma once

#include <cstddef>
#include <vector>

namespace voz {

/// Symmetric positive-definite band matrix, lower storage:
/// entry (i, j) with 0 <= i - j <= bandwidth lives at band(i - j, j).
class BandedSPDMatrix {
public:
    BandedSPDMatrix(std::size_t n, std::size_t bandwidth)
        : n_(n), bw_(bandwidth), data_((bandwidth + 1) * n, 0.0) {}

    std::size_t size() const { return n_; }
    std::size_t bandwidth() const { return bw_; }

    double& at(std::size_t diag, std::size_t col) { return data_[diag * n_ + col]; }
    double at(std::size_t diag, std::size_t col) const { return data_[diag * n_ + col]; }

    /// Add v to the symmetric pair (i, j), (j, i). |i - j| must be within the band.
    void add(std::size_t i, std::size_t j, double v);

private:
    std::size_t n_, bw_;
    std::vector<double> data_;
};

/// Solve A x = b by banded Cholesky factorization. Throws std::logic_error
/// if A is not positive definite.
std::vector<double> solve_banded_spd(BandedSPDMatrix a, std::vector<double> b);

}  // namespace voz
