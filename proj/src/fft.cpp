#include "fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <new>
#include <stdexcept>

namespace bipolar::detail {

namespace {
// The FFTW planner is not thread safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n) {
    if (n == 0) throw std::invalid_argument("FftPlan: empty transform");
    std::lock_guard lock(planner_mutex());
    auto* raw = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (raw == nullptr) throw std::bad_alloc();
    buffer_ = reinterpret_cast<std::complex<double>*>(raw);
    const int len = static_cast<int>(n);
    forward_plan_ = fftw_plan_dft_1d(len, raw, raw, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_plan_ = fftw_plan_dft_1d(len, raw, raw, FFTW_BACKWARD, FFTW_ESTIMATE);
}

FftPlan::~FftPlan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
    fftw_free(buffer_);
}

void FftPlan::forward() { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }

void FftPlan::backward() { fftw_execute(static_cast<fftw_plan>(backward_plan_)); }

}  // namespace bipolar::detail
