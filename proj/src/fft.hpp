#pragma once

#include <complex>
#include <vector>

namespace fdsic::detail {

// Unnormalized DFT: forward uses e^{-j2pi kn/N}, inverse e^{+j2pi kn/N}.
void fft_inplace(std::vector<std::complex<double>>& data, bool inverse);

// Frequency in Hz of DFT bin k for an N-point transform, mapped to [-fs/2, fs/2).
double bin_frequency(std::size_t k, std::size_t n, double sample_rate_hz);

}  // namespace fdsic::detail
