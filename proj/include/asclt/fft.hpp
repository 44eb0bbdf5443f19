#ifndef ASCLT_FFT_HPP
#define ASCLT_FFT_HPP

// Discrete Fourier transforms of arbitrary length.
//
//   forward:  X_k = sum_j x_j exp(-2 pi i j k / n)
//   inverse:  x_j = sum_k X_k exp(+2 pi i j k / n)      (unnormalized)
//
// Powers of two use an iterative radix-2 kernel. Other lengths go through
// Bluestein's chirp-z identity jk = (j^2 + k^2 - (k-j)^2)/2, which turns the
// transform into a cyclic convolution of power-of-two length m >= 2n-1.
//
// Plans are immutable after construction and may be shared between threads;
// every call allocates its own scratch.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "asclt/numeric.hpp"

namespace asclt
{

using cplx = std::complex<double>;

namespace detail
{
[[nodiscard]] constexpr bool is_pow2(std::size_t n) noexcept
{
    return n != 0 && (n & (n - 1)) == 0;
}

[[nodiscard]] constexpr std::size_t next_pow2(std::size_t n) noexcept
{
    std::size_t m = 1;
    while (m < n)
        m <<= 1;
    return m;
}

/// In-place radix-2 transform for power-of-two sizes.
class Radix2Kernel
{
  public:
    explicit Radix2Kernel(std::size_t n) : n_{n}, bitrev_(n), twiddle_(n > 1 ? n - 1 : 0)
    {
        unsigned log2n = 0;
        while ((std::size_t{1} << log2n) < n)
            ++log2n;
        for (std::size_t i = 0; i < n; ++i)
        {
            std::size_t r = 0;
            for (unsigned b = 0; b < log2n; ++b)
                r |= ((i >> b) & 1u) << (log2n - 1 - b);
            bitrev_[i] = static_cast<std::uint32_t>(r);
        }
        // Stage with half-width h keeps its twiddles e^{-2 pi i k/(2h)} at [h-1, 2h-1).
        for (std::size_t h = 1; h < n; h <<= 1)
            for (std::size_t k = 0; k < h; ++k)
            {
                auto const [c, s] = cos_sin_turn(k, 2 * h);
                twiddle_[h - 1 + k] = cplx(c, -s);
            }
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }

    /// conjugate = true computes the +i transform.
    void run(std::span<cplx> data, bool conjugate) const noexcept
    {
        for (std::size_t i = 0; i < n_; ++i)
        {
            std::size_t const r = bitrev_[i];
            if (r > i)
                std::swap(data[i], data[r]);
        }
        // Butterflies written on raw doubles; std::complex multiplication
        // carries NaN-recovery branches that cost a factor of several here.
        auto* d = reinterpret_cast<double*>(data.data());
        double const sign = conjugate ? -1.0 : 1.0;
        for (std::size_t h = 1; h < n_; h <<= 1)
        {
            cplx const* tw = twiddle_.data() + (h - 1);
            for (std::size_t start = 0; start < n_; start += 2 * h)
            {
                for (std::size_t k = 0; k < h; ++k)
                {
                    double const wr = tw[k].real();
                    double const wi = sign * tw[k].imag();
                    double* a = d + 2 * (start + k);
                    double* b = d + 2 * (start + k + h);
                    double const tr = b[0] * wr - b[1] * wi;
                    double const ti = b[0] * wi + b[1] * wr;
                    b[0] = a[0] - tr;
                    b[1] = a[1] - ti;
                    a[0] += tr;
                    a[1] += ti;
                }
            }
        }
    }

  private:
    std::size_t n_;
    std::vector<std::uint32_t> bitrev_;
    std::vector<cplx> twiddle_;
};

inline void multiply_pointwise(std::span<cplx> a, std::span<cplx const> b) noexcept
{
    auto* x = reinterpret_cast<double*>(a.data());
    auto const* y = reinterpret_cast<double const*>(b.data());
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        double const re = x[2 * i] * y[2 * i] - x[2 * i + 1] * y[2 * i + 1];
        double const im = x[2 * i] * y[2 * i + 1] + x[2 * i + 1] * y[2 * i];
        x[2 * i] = re;
        x[2 * i + 1] = im;
    }
}
} // namespace detail

/// Complex DFT plan of a fixed length n >= 1.
class FftPlan
{
  public:
    explicit FftPlan(std::size_t n) : n_{n}
    {
        if (n == 0)
            throw std::invalid_argument("FFT length must be positive");
        if (detail::is_pow2(n))
        {
            kernel_ = std::make_shared<detail::Radix2Kernel const>(n);
            return;
        }
        std::size_t const m = detail::next_pow2(2 * n - 1);
        kernel_ = std::make_shared<detail::Radix2Kernel const>(m);
        // chirp_j = e^{-i pi j^2 / n}; j^2 is reduced mod 2n in integers first.
        chirp_.resize(n);
        for (std::size_t j = 0; j < n; ++j)
        {
            auto const jj = static_cast<std::uint64_t>(j) * j % (2 * n);
            auto const [c, s] = cos_sin_turn(jj, 2 * n);
            chirp_[j] = cplx(c, -s);
        }
        filter_.assign(m, cplx{});
        filter_[0] = std::conj(chirp_[0]);
        for (std::size_t j = 1; j < n; ++j)
        {
            filter_[j] = std::conj(chirp_[j]);
            filter_[m - j] = std::conj(chirp_[j]);
        }
        kernel_->run(filter_, false);
        double const inv_m = 1.0 / static_cast<double>(m);
        for (auto& f : filter_)
            f *= inv_m;
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] bool uses_bluestein() const noexcept { return !chirp_.empty(); }

    void forward(std::span<cplx> data) const { transform(data, false); }
    void inverse(std::span<cplx> data) const { transform(data, true); }

  private:
    void transform(std::span<cplx> data, bool conjugate) const
    {
        if (data.size() != n_)
            throw std::invalid_argument("FFT input length does not match plan");
        if (!uses_bluestein())
        {
            kernel_->run(data, conjugate);
            return;
        }
        // The +i transform is conj(F(conj(x))).
        std::vector<cplx> work(kernel_->size(), cplx{});
        for (std::size_t j = 0; j < n_; ++j)
            work[j] = (conjugate ? std::conj(data[j]) : data[j]) * chirp_[j];
        kernel_->run(work, false);
        detail::multiply_pointwise(work, filter_);
        kernel_->run(work, true);
        for (std::size_t k = 0; k < n_; ++k)
        {
            cplx const v = work[k] * chirp_[k];
            data[k] = conjugate ? std::conj(v) : v;
        }
    }

    std::size_t n_;
    std::shared_ptr<detail::Radix2Kernel const> kernel_;
    std::vector<cplx> chirp_;
    std::vector<cplx> filter_;
};

/// Forward DFT of a real sequence; returns bins 0 ... floor(n/2).
///
/// Even lengths pack the input into a half-length complex transform.
class RealDft
{
  public:
    explicit RealDft(std::size_t n) : n_{n}, plan_{n % 2 == 0 && n >= 2 ? n / 2 : n}
    {
        if (n % 2 == 0 && n >= 2)
        {
            std::size_t const half = n / 2;
            split_.resize(half + 1);
            for (std::size_t k = 0; k <= half; ++k)
            {
                auto const [c, s] = cos_sin_turn(k, n);
                split_[k] = cplx(c, -s);
            }
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }

    [[nodiscard]] std::vector<cplx> forward(std::span<double const> x) const
    {
        if (x.size() != n_)
            throw std::invalid_argument("DFT input length does not match plan");
        std::size_t const bins = n_ / 2 + 1;
        if (split_.empty())
        {
            std::vector<cplx> z(x.begin(), x.end());
            plan_.forward(z);
            z.resize(bins);
            return z;
        }
        std::size_t const half = n_ / 2;
        std::vector<cplx> z(half);
        for (std::size_t l = 0; l < half; ++l)
            z[l] = cplx(x[2 * l], x[2 * l + 1]);
        plan_.forward(z);
        // E_k = (Z_k + conj Z_{h-k})/2 is the DFT of the even samples,
        // O_k = (Z_k - conj Z_{h-k})/(2i) of the odd ones; X_k = E_k + w^k O_k.
        std::vector<cplx> out(bins);
        for (std::size_t k = 0; k <= half; ++k)
        {
            cplx const a = z[k % half];
            cplx const b = std::conj(z[(half - k) % half]);
            double const er = 0.5 * (a.real() + b.real());
            double const ei = 0.5 * (a.imag() + b.imag());
            double const dr = 0.5 * (a.real() - b.real());
            double const di = 0.5 * (a.imag() - b.imag());
            // O = (dr + i di)/i = di - i dr
            double const orr = di;
            double const oi = -dr;
            double const wr = split_[k].real();
            double const wi = split_[k].imag();
            out[k] = cplx(er + wr * orr - wi * oi, ei + wr * oi + wi * orr);
        }
        return out;
    }

  private:
    std::size_t n_;
    FftPlan plan_;
    std::vector<cplx> split_;
};

/// Direct O(n^2) DFT with compensated accumulation; reference for tests and
/// tiny sizes.
[[nodiscard]] inline std::vector<cplx> dft_direct(std::span<cplx const> x)
{
    std::size_t const n = x.size();
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        CompensatedSum re, im;
        for (std::size_t j = 0; j < n; ++j)
        {
            auto const [c, s] = cos_sin_turn(static_cast<std::uint64_t>(j) * k % n, n);
            re.add(x[j].real() * c + x[j].imag() * s);
            im.add(x[j].imag() * c - x[j].real() * s);
        }
        out[k] = cplx(re.value(), im.value());
    }
    return out;
}

} // namespace asclt

#endif
