#include "qid/fft.hpp"

#include <fftw3.h>

#include <stdexcept>

namespace qid {

void dft(std::vector<std::complex<double>>& data, const std::vector<int>& dims, int sign) {
    size_t n = 1;
    for (int d : dims) {
        if (d <= 0) throw std::invalid_argument("dft: non-positive dimension");
        n *= static_cast<size_t>(d);
    }
    if (n != data.size()) throw std::invalid_argument("dft: dims do not match data size");
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), ptr, ptr,
                                   sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!plan) throw std::runtime_error("dft: planner failed");
    fftw_execute(plan);
    fftw_destroy_plan(plan);
}

}  // namespace qid
