#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "mriaug/grid.hpp"

namespace mriaug {

using cplx = std::complex<double>;

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// In-place iterative radix-2 transform of a fixed power-of-two length.
class Radix2 {
public:
    Radix2() = default;

    explicit Radix2(std::size_t n) : n_(n), twiddle_(n / 2), bitrev_(n) {
        for (std::size_t k = 0; k < n / 2; ++k) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
            twiddle_[k] = {std::cos(angle), std::sin(angle)};
        }
        std::size_t bits = 0;
        while ((std::size_t{1} << bits) < n) ++bits;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < bits; ++b)
                if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
            bitrev_[i] = r;
        }
    }

    void transform(std::span<cplx> x, bool inverse) const {
        for (std::size_t i = 0; i < n_; ++i)
            if (i < bitrev_[i]) std::swap(x[i], x[bitrev_[i]]);
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            const std::size_t half = len / 2;
            const std::size_t step = n_ / len;
            for (std::size_t start = 0; start < n_; start += len) {
                for (std::size_t k = 0; k < half; ++k) {
                    cplx w = twiddle_[k * step];
                    if (inverse) w = std::conj(w);
                    const cplx a = x[start + k];
                    const cplx b = x[start + k + half] * w;
                    x[start + k] = a + b;
                    x[start + k + half] = a - b;
                }
            }
        }
    }

private:
    std::size_t n_ = 0;
    std::vector<cplx> twiddle_;
    std::vector<std::size_t> bitrev_;
};

} // namespace detail

/// Exact-length 1D DFT. Powers of two go through radix-2; any other length
/// uses Bluestein's chirp-z reformulation on a power-of-two convolution, so
/// the transform length (and hence artifact geometry) is never padded.
class Fft1d {
public:
    explicit Fft1d(std::size_t n) : n_(n) {
        if (n <= 1) return;
        if (detail::is_pow2(n)) {
            radix_ = detail::Radix2(n);
            return;
        }
        m_ = 1;
        while (m_ < 2 * n - 1) m_ <<= 1;
        radix_ = detail::Radix2(m_);
        chirp_.resize(n);
        const std::size_t two_n = 2 * n;
        for (std::size_t k = 0; k < n; ++k) {
            // k^2 mod 2n keeps the phase argument small and exact.
            const std::size_t k2 = (k * k) % two_n;
            const double angle = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
            chirp_[k] = {std::cos(angle), std::sin(angle)};
        }
        kernel_.assign(m_, cplx{});
        kernel_[0] = std::conj(chirp_[0]);
        for (std::size_t k = 1; k < n; ++k) kernel_[k] = kernel_[m_ - k] = std::conj(chirp_[k]);
        radix_.transform(kernel_, false);
    }

    std::size_t size() const noexcept { return n_; }

    /// X[k] = sum_j x[j] exp(-2 pi i jk / n), unnormalized.
    void forward(std::span<cplx> x) const { run(x, false); }

    /// x[j] = sum_k X[k] exp(+2 pi i jk / n), unnormalized (caller divides by n).
    void inverse(std::span<cplx> x) const { run(x, true); }

private:
    void run(std::span<cplx> x, bool inverse) const {
        if (n_ <= 1) return;
        if (m_ == 0) {
            radix_.transform(x, inverse);
            return;
        }
        if (inverse)
            for (auto& v : x) v = std::conj(v);
        std::vector<cplx> a(m_, cplx{});
        for (std::size_t j = 0; j < n_; ++j) a[j] = x[j] * chirp_[j];
        radix_.transform(a, false);
        for (std::size_t j = 0; j < m_; ++j) a[j] *= kernel_[j];
        radix_.transform(a, true);
        const double scale = 1.0 / static_cast<double>(m_);
        for (std::size_t k = 0; k < n_; ++k) x[k] = a[k] * scale * chirp_[k];
        if (inverse)
            for (auto& v : x) v = std::conj(v);
    }

    std::size_t n_;
    std::size_t m_ = 0;
    detail::Radix2 radix_;
    std::vector<cplx> chirp_;
    std::vector<cplx> kernel_;
};

/// Applies a 1D transform to every line of `g` along `axis`.
inline void fft_along(Grid3<cplx>& g, Axis axis, bool inverse) {
    const std::size_t len = g.extent(axis);
    if (len <= 1) return;
    const Fft1d plan(len);
    const std::size_t stride = g.stride(axis);
    const Shape& s = g.shape();
    std::vector<cplx> line(len);
    const int a = static_cast<int>(axis);
    const int u = (a + 1) % 3;
    const int v = (a + 2) % 3;
    for (std::size_t j = 0; j < s[v]; ++j) {
        for (std::size_t i = 0; i < s[u]; ++i) {
            std::array<std::size_t, 3> c{};
            c[u] = i;
            c[v] = j;
            const std::size_t base = g.index(c[0], c[1], c[2]);
            for (std::size_t k = 0; k < len; ++k) line[k] = g[base + k * stride];
            if (inverse)
                plan.inverse(line);
            else
                plan.forward(line);
            for (std::size_t k = 0; k < len; ++k) g[base + k * stride] = line[k];
        }
    }
}

} // namespace mriaug
