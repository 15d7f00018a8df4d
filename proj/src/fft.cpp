// SPDX-License-Identifier: Apache-2.0
#include "mdmsim/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace mdmsim {

namespace {

// Plans are cached per (size, direction). FFTW_ESTIMATE keeps planning
// deterministic; FFTW_UNALIGNED lets one plan serve arbitrary buffers.
class PlanCache {
  public:
    fftw_plan get(std::size_t n, bool inverse) {
        const std::uint64_t key = (static_cast<std::uint64_t>(n) << 1) | (inverse ? 1u : 0u);
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<cplx> probe(n);
        fftw_plan p = fftw_plan_dft_1d(
            static_cast<int>(n), reinterpret_cast<fftw_complex*>(probe.data()),
            reinterpret_cast<fftw_complex*>(probe.data()),
            inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p) throw std::runtime_error("fft: planning failed");
        plans_.emplace(key, p);
        return p;
    }

  private:
    std::mutex mutex_;
    std::unordered_map<std::uint64_t, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

} // namespace

void fft_inplace(std::vector<cplx>& x, bool inverse) {
    if (x.empty()) throw std::invalid_argument("fft: empty input");
    fftw_plan p = cache().get(x.size(), inverse);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(x.data()),
                     reinterpret_cast<fftw_complex*>(x.data()));
    if (inverse) {
        const double scale = 1.0 / static_cast<double>(x.size());
        for (cplx& v : x) v *= scale;
    }
}

std::vector<cplx> fft(std::vector<cplx> x) {
    fft_inplace(x, false);
    return x;
}

std::vector<cplx> ifft(std::vector<cplx> x) {
    fft_inplace(x, true);
    return x;
}

double bin_frequency(std::size_t bin, std::size_t n, double fs) {
    const auto half = n / 2;
    const double k = (bin <= half) ? static_cast<double>(bin)
                                   : static_cast<double>(bin) - static_cast<double>(n);
    return k * fs / static_cast<double>(n);
}

} // namespace mdmsim
