#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include "spikewave/common.hpp"

namespace spikewave::detail {

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// Iterative radix-2 Cooley-Tukey transform in place. Size must be a power
/// of two. The inverse applies the 1/n scaling.
inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  if ((n & (n - 1)) != 0)
    throw numeric_error("fft size must be a power of two");

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  // Twiddle table for the full transform; stages index with stride n/len.
  std::vector<std::complex<double>> roots(n / 2);
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double ang = sign * 2.0 * std::numbers::pi *
                       static_cast<double>(k) / static_cast<double>(n);
    roots[k] = {std::cos(ang), std::sin(ang)};
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> w = roots[j * stride];
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& v : a) v *= inv_n;
  }
}

/// Linear convolution of two complex sequences via zero-padded FFTs.
inline std::vector<std::complex<double>> fft_convolve(
    const std::vector<std::complex<double>>& a,
    const std::vector<std::complex<double>>& b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  const std::size_t n = next_pow2(out_len);
  std::vector<std::complex<double>> fa(n), fb(n);
  std::copy(a.begin(), a.end(), fa.begin());
  std::copy(b.begin(), b.end(), fb.begin());
  fft_inplace(fa, false);
  fft_inplace(fb, false);
  for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  fft_inplace(fa, true);
  fa.resize(out_len);
  return fa;
}

}  // namespace spikewave::detail
