#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace schrolab {

// Unnormalized complex DFT of a d-dimensional cube (n^d points), backed by FFTW.
// forward: X_k = sum_j x_j e^{-2 pi i k.j/n};  inverse: x_j = sum_k X_k e^{+2 pi i k.j/n}.
// Plans are built with FFTW_ESTIMATE | FFTW_UNALIGNED so results are deterministic and
// any std::vector<std::complex<double>> can be passed in place.
class Dft {
public:
    Dft(int d, std::size_t n);
    ~Dft();
    Dft(const Dft&) = delete;
    Dft& operator=(const Dft&) = delete;
    Dft(Dft&&) noexcept;
    Dft& operator=(Dft&&) noexcept;

    void forward(std::span<std::complex<double>> data) const;
    void inverse(std::span<std::complex<double>> data) const;

    std::size_t size() const noexcept { return total_; }
    int dim() const noexcept { return d_; }
    std::size_t n() const noexcept { return n_; }

private:
    struct Plans;
    int d_;
    std::size_t n_;
    std::size_t total_;
    std::unique_ptr<Plans> plans_;
};

}  // namespace schrolab
