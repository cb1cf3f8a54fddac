#include "taxotrace/dsp.hpp"

#include <cmath>
#include <map>

#include "taxotrace/error.hpp"

namespace taxotrace {

namespace {

// Twiddle factors exp(-2*pi*i*k/n) for k < n/2, cached per transform size.
// Every stage of length `len` reads this table at stride n/len, which keeps
// the butterflies free of the serial w *= wlen recurrence.
const std::vector<std::complex<double>>& twiddles(std::size_t n) {
    thread_local std::map<std::size_t, std::vector<std::complex<double>>> cache;
    auto& table = cache[n];
    if (table.empty()) {
        table.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            const double angle = -2.0 * M_PI * double(k) / double(n);
            table[k] = {std::cos(angle), std::sin(angle)};
        }
    }
    return table;
}

}  // namespace

void fft(std::vector<std::complex<double>>& data, bool inverse) {
    const std::size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0) {
        throw TraceError(ErrorCode::InvalidArgument, "fft size must be a power of two");
    }
    if (n == 1) return;
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    const auto& tw = twiddles(n);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> w =
                    inverse ? std::conj(tw[k * stride]) : tw[k * stride];
                const std::complex<double> u = data[i + k];
                const std::complex<double> v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
            }
        }
    }
    if (inverse) {
        for (auto& c : data) c /= static_cast<double>(n);
    }
}

Dct::Dct(int n) : n_(n), basis_(static_cast<std::size_t>(n) * n) {
    const double scale0 = std::sqrt(1.0 / n);
    const double scale = std::sqrt(2.0 / n);
    for (int k = 0; k < n; ++k) {
        for (int t = 0; t < n; ++t) {
            const double c = std::cos(M_PI * (t + 0.5) * k / n);
            basis_[static_cast<std::size_t>(k) * n + t] = (k == 0 ? scale0 : scale) * c;
        }
    }
}

void Dct::forward(const double* in, double* out) const {
    for (int k = 0; k < n_; ++k) {
        double acc = 0.0;
        const double* row = basis_.data() + static_cast<std::size_t>(k) * n_;
        for (int t = 0; t < n_; ++t) acc += row[t] * in[t];
        out[k] = acc;
    }
}

void Dct::inverse(const double* in, double* out) const {
    for (int t = 0; t < n_; ++t) out[t] = 0.0;
    for (int k = 0; k < n_; ++k) {
        const double* row = basis_.data() + static_cast<std::size_t>(k) * n_;
        const double v = in[k];
        for (int t = 0; t < n_; ++t) out[t] += row[t] * v;
    }
}

std::vector<double> moving_average(const std::vector<double>& x, int width) {
    if (width <= 1 || x.empty()) return x;
    const int n = static_cast<int>(x.size());
    const int half = width / 2;
    std::vector<double> out(x.size());
    // prefix sums with clamped edges
    std::vector<double> prefix(x.size() + 1, 0.0);
    for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];
    for (int i = 0; i < n; ++i) {
        int lo = std::max(0, i - half);
        int hi = std::min(n - 1, i + half);
        out[i] = (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1);
    }
    return out;
}

}  // namespace taxotrace
