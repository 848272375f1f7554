#pragma once

#include <complex>
#include <vector>

namespace qid {

// In-place complex DFT over a row-major multidimensional array (FFTW
// backend, unnormalized). sign = -1 forward (e^{-i...}), +1 backward.
void dft(std::vector<std::complex<double>>& data, const std::vector<int>& dims, int sign);

inline void dft_1d(std::vector<std::complex<double>>& data, int sign) {
    dft(data, {static_cast<int>(data.size())}, sign);
}

}  // namespace qid
