#include "schrolab/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace schrolab {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct Dft::Plans {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
    ~Plans() {
        std::lock_guard lock(planner_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (inv) fftw_destroy_plan(inv);
    }
};

Dft::Dft(int d, std::size_t n) : d_(d), n_(n), total_(1), plans_(std::make_unique<Plans>()) {
    if (d < 1 || d > 3) throw std::invalid_argument("Dft: dimension must be 1, 2 or 3");
    if (n < 2) throw std::invalid_argument("Dft: n must be >= 2");
    for (int i = 0; i < d; ++i) total_ *= n;
    int dims[3] = {static_cast<int>(n), static_cast<int>(n), static_cast<int>(n)};
    auto* buf = fftw_alloc_complex(total_);
    if (!buf) throw std::bad_alloc();
    {
        std::lock_guard lock(planner_mutex());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        plans_->fwd = fftw_plan_dft(d, dims, buf, buf, FFTW_FORWARD, flags);
        plans_->inv = fftw_plan_dft(d, dims, buf, buf, FFTW_BACKWARD, flags);
    }
    fftw_free(buf);
    if (!plans_->fwd || !plans_->inv) throw std::runtime_error("Dft: FFTW planning failed");
}

Dft::~Dft() = default;
Dft::Dft(Dft&&) noexcept = default;
Dft& Dft::operator=(Dft&&) noexcept = default;

void Dft::forward(std::span<std::complex<double>> data) const {
    if (data.size() != total_) throw std::invalid_argument("Dft::forward: size mismatch");
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plans_->fwd, p, p);
}

void Dft::inverse(std::span<std::complex<double>> data) const {
    if (data.size() != total_) throw std::invalid_argument("Dft::inverse: size mismatch");
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plans_->inv, p, p);
}

}  // namespace schrolab
