#pragma once

#include <vector>

#include "lightam/vec3.hpp"

namespace lightam {

// Thin wrapper over an FFTW plan for a complex transform of fixed shape.
// Unnormalised in both directions; sign -1 is forward, +1 is backward.
class FFTPlan {
public:
    FFTPlan(std::vector<int> dims, int sign);
    ~FFTPlan();
    FFTPlan(const FFTPlan&) = delete;
    FFTPlan& operator=(const FFTPlan&) = delete;

    // Safe to call concurrently on distinct arrays of the planned size.
    void execute(const cplx* in, cplx* out) const;
    [[nodiscard]] std::size_t size() const { return size_; }

private:
    std::vector<int> dims_;
    std::size_t size_ = 0;
    void* plan_ = nullptr;
};

// Signed frequency index of FFT bin i out of n.
inline int fft_freq(int i, int n) { return i < (n + 1) / 2 ? i : i - n; }

}  // namespace lightam
