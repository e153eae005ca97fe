#include "fft.hpp"

#include <fftw3.h>

#include <memory>

#include <stdexcept>

namespace fdsic::detail {

namespace {

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};

}  // namespace

void fft_inplace(std::vector<std::complex<double>>& data, bool inverse) {
    if (data.empty()) return;
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    // FFTW_ESTIMATE never touches the buffer during planning and is deterministic.
    std::unique_ptr<fftw_plan_s, PlanDeleter> plan(
        fftw_plan_dft_1d(static_cast<int>(data.size()), buf, buf,
                         inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE));
    if (!plan) throw std::runtime_error("fftw: plan creation failed");
    fftw_execute(plan.get());
}

double bin_frequency(std::size_t k, std::size_t n, double sample_rate_hz) {
    const auto half = n / 2;
    const double kk = k < (n - half) ? static_cast<double>(k)
                                     : static_cast<double>(k) - static_cast<double>(n);
    return kk * sample_rate_hz / static_cast<double>(n);
}

}  // namespace fdsic::detail
