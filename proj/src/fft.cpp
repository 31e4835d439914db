#include "lightam/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace lightam {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

FFTPlan::FFTPlan(std::vector<int> dims, int sign) : dims_(std::move(dims)) {
    if (dims_.empty()) throw std::invalid_argument("FFTPlan: no dimensions");
    size_ = 1;
    for (int d : dims_) {
        if (d < 1) throw std::invalid_argument("FFTPlan: non-positive dimension");
        size_ *= static_cast<std::size_t>(d);
    }
    std::vector<cplx> a(size_), b(size_);
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_ = fftw_plan_dft(static_cast<int>(dims_.size()), dims_.data(), reinterpret_cast<fftw_complex*>(a.data()),
                          reinterpret_cast<fftw_complex*>(b.data()), sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                          FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan_) throw std::runtime_error("FFTPlan: planner failed");
}

FFTPlan::~FFTPlan() {
    if (!plan_) return;
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

void FFTPlan::execute(const cplx* in, cplx* out) const {
    fftw_execute_dft(static_cast<fftw_plan>(plan_), reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

}  // namespace lightam
