#pragma once

#include <complex>
#include <vector>

namespace taxotrace {

/// In-place radix-2 FFT. data.size() must be a power of two.
void fft(std::vector<std::complex<double>>& data, bool inverse);

/// Orthonormal DCT-II over a frame and its inverse (DCT-III).
class Dct {
public:
    explicit Dct(int n);
    void forward(const double* in, double* out) const;
    void inverse(const double* in, double* out) const;
    int size() const { return n_; }

private:
    int n_;
    std::vector<double> basis_;  // n*n, row = output coefficient
};

/// Centered moving average with clamped edges.
std::vector<double> moving_average(const std::vector<double>& x, int width);

}  // namespace taxotrace
