#pragma once

#include <complex>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

#include "gmech/errors.hpp"

namespace gmech::detail {

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// Unit roots e^{-2 pi i k / n}, k = 0..n/2-1, cached per size.
inline const std::vector<std::complex<double>>& fft_twiddles(int n) {
    thread_local std::map<int, std::vector<std::complex<double>>> cache;
    auto& t = cache[n];
    if (t.empty()) {
        t.resize(static_cast<std::size_t>(n / 2));
        for (int k = 0; k < n / 2; ++k)
            t[static_cast<std::size_t>(k)] =
                std::polar(1.0, -2.0 * std::numbers::pi * k / n);
    }
    return t;
}

/// Iterative radix-2 FFT. Power-of-two sizes only; the inverse is scaled by 1/n.
inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
    const int n = static_cast<int>(a.size());
    if (!is_power_of_two(n)) throw ValidationError("fft: size must be a power of two");
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[static_cast<std::size_t>(i)], a[static_cast<std::size_t>(j)]);
    }
    const auto& tw = fft_twiddles(n);
    for (int len = 2; len <= n; len <<= 1) {
        const int stride = n / len;
        for (int i = 0; i < n; i += len) {
            for (int k = 0; k < len / 2; ++k) {
                std::complex<double> w = tw[static_cast<std::size_t>(k * stride)];
                if (inverse) w = std::conj(w);
                const std::complex<double> u = a[static_cast<std::size_t>(i + k)];
                const std::complex<double> v = a[static_cast<std::size_t>(i + k + len / 2)] * w;
                a[static_cast<std::size_t>(i + k)] = u + v;
                a[static_cast<std::size_t>(i + k + len / 2)] = u - v;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

inline std::vector<std::complex<double>> fft_of_real(const std::vector<double>& f) {
    std::vector<std::complex<double>> a(f.begin(), f.end());
    fft_inplace(a, false);
    return a;
}

inline std::vector<double> real_ifft(std::vector<std::complex<double>> spec) {
    fft_inplace(spec, true);
    std::vector<double> out(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) out[i] = spec[i].real();
    return out;
}

} // namespace gmech::detail
