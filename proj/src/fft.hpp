#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace bipolar::detail {

// In-place complex FFT over an owned buffer. Transforms are unnormalized:
// forward uses exp(-2 pi i n k / N), backward exp(+2 pi i n k / N).
// Plans are made with FFTW_ESTIMATE so results do not depend on timing.
class FftPlan {
public:
    explicit FftPlan(std::size_t n);
    ~FftPlan();

    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    std::span<std::complex<double>> buffer() { return {buffer_, n_}; }
    std::size_t size() const { return n_; }

    void forward();
    void backward();

private:
    std::size_t n_;
    std::complex<double>* buffer_;
    void* forward_plan_;
    void* backward_plan_;
};

}  // namespace bipolar::detail
