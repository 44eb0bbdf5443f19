#ifndef ASCLT_SPECTRA_HPP
#define ASCLT_SPECTRA_HPP

// Random circulant-type matrices and periodograms, with spectra read off the
// DFT instead of a dense eigensolver.
//
// A circulant with first row c has eigenvalues lambda_k = sum_j c_j e^{-2 pi i jk/n}.
// Symmetric circulant: c_l = c_{n-l}, so every lambda_k is real and
// lambda_k = lambda_{n-k}; only k = 0 (and k = n/2 for even n) are unpaired.
// Reverse circulant: R_{ij} = x_{(i+j) mod n}; its eigenvalues are the
// unpaired sum_j x_j (and the alternating sum for even n) plus +-|lambda_k|.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Eigenvalues>

#include "asclt/empirical.hpp"
#include "asclt/fft.hpp"
#include "asclt/numeric.hpp"
#include "asclt/sources.hpp"
#include "asclt/transform.hpp"

namespace asclt
{

enum class Ensemble : std::uint8_t
{
    symmetric_circulant,
    reverse_circulant,
    palindromic,
    raw_circulant_dft,
};

[[nodiscard]] inline std::string_view ensemble_name(Ensemble e) noexcept
{
    switch (e)
    {
    case Ensemble::symmetric_circulant: return "symmetric_circulant";
    case Ensemble::reverse_circulant: return "reverse_circulant";
    case Ensemble::palindromic: return "palindromic";
    case Ensemble::raw_circulant_dft: return "raw_circulant_dft";
    }
    return "?";
}

struct Spectrum
{
    Ensemble ensemble = Ensemble::symmetric_circulant;
    std::size_t n = 0;
    double normalization = 1.0;       ///< scale applied to the matrix
    std::vector<double> eigenvalues;  ///< all n, ascending
    std::vector<double> typical;      ///< eigenvalues minus the exceptional ones, ascending
    std::vector<double> exceptional;  ///< the unpaired eigenvalues (at most two)
    double max_imag_residual = 0.0;   ///< largest |Im lambda| discarded (real ensembles)
    std::vector<cplx> complex_values; ///< raw circulant only: lambda_k, k = 0..n-1, in index order
};

/// Exact eigenvalues of the circulant matrix with the given first row.
[[nodiscard]] inline std::vector<cplx> circulant_eigen_dft(std::span<double const> first_row)
{
    if (first_row.empty())
        throw std::invalid_argument("circulant needs n >= 1");
    std::vector<cplx> a(first_row.begin(), first_row.end());
    FftPlan(a.size()).forward(a);
    return a;
}

struct Standardization
{
    double mean = 0.0;
    double sigma = 1.0;
};

/// First row of the symmetric circulant A_n built from (X_j - mean)/sigma:
/// c_0 = X_1 and c_l = c_{n-l} = X_{l+1} for 1 <= l <= floor(n/2).
[[nodiscard]] inline std::vector<double> symmetric_circulant_row(std::size_t n, SourceSpec const& spec,
                                                                 Standardization std_ = {})
{
    if (!(std_.sigma > 0.0))
        throw std::invalid_argument("standardization sigma must be positive");
    std::vector<double> c(n);
    for (std::size_t l = 0; l <= n / 2; ++l)
    {
        double const x = (spec.sample(l + 1) - std_.mean) / std_.sigma;
        c[l] = x;
        c[(n - l) % n] = x;
    }
    return c;
}

namespace detail
{
[[nodiscard]] inline Spectrum assemble(Ensemble e, std::size_t n, double normalization, std::vector<double> typical,
                                       std::vector<double> exceptional)
{
    Spectrum sp;
    sp.ensemble = e;
    sp.n = n;
    sp.normalization = normalization;
    std::sort(typical.begin(), typical.end());
    sp.eigenvalues = typical;
    sp.eigenvalues.insert(sp.eigenvalues.end(), exceptional.begin(), exceptional.end());
    std::sort(sp.eigenvalues.begin(), sp.eigenvalues.end());
    sp.typical = std::move(typical);
    sp.exceptional = std::move(exceptional);
    return sp;
}
} // namespace detail

/// Spectrum of A_n / (sigma sqrt n) with the inputs centered by `mean`.
/// Centering the inputs stands in for subtracting the rank-one mean matrix.
[[nodiscard]] inline Spectrum symmetric_circulant_spectrum(std::size_t n, SourceSpec const& spec,
                                                           Standardization std_ = {})
{
    if (n < 3)
        throw std::invalid_argument("symmetric circulant spectrum needs n >= 3");
    auto const row = symmetric_circulant_row(n, spec, std_);
    auto const lambda = circulant_eigen_dft(row);
    double const scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<double> typical, exceptional;
    double imag = 0.0;
    for (std::size_t k = 0; k < n; ++k)
    {
        imag = std::max(imag, std::abs(lambda[k].imag()) * scale);
        double const value = lambda[k].real() * scale;
        if (k == 0 || 2 * k == n)
            exceptional.push_back(value);
        else
            typical.push_back(value);
    }
    Spectrum sp = detail::assemble(Ensemble::symmetric_circulant, n, scale, std::move(typical), std::move(exceptional));
    sp.max_imag_residual = imag;
    return sp;
}

/// Spectrum of sqrt(2/n) R_n, R_n the reverse circulant of X_1..X_n.
/// Typical eigenvalues are exactly +-sqrt(S_{n,k}^2 + T_{n,k}^2),
/// k = 1..floor((n-1)/2), with the trig-weighted sums of the transform module.
[[nodiscard]] inline Spectrum reverse_circulant_spectrum(std::size_t n, SourceSpec const& spec)
{
    if (n < 3)
        throw std::invalid_argument("reverse circulant spectrum needs n >= 3");
    auto const x = spec.draw(n);
    std::size_t const r = max_trig_rows(n);
    PartialSums const sums = partial_sums(WeightMatrixPair::trig(n, r), x);
    double const scale = std::sqrt(2.0 / static_cast<double>(n));
    std::vector<double> typical;
    typical.reserve(2 * r);
    for (std::size_t k = 0; k < r; ++k)
    {
        double const mag = std::hypot(sums.s[k], (*sums.t)[k]);
        typical.push_back(mag);
        typical.push_back(-mag);
    }
    CompensatedSum total, alternating;
    for (std::size_t j = 0; j < n; ++j)
    {
        total.add(x[j]);
        alternating.add(j % 2 == 0 ? x[j] : -x[j]);
    }
    std::vector<double> exceptional{scale * total.value()};
    if (n % 2 == 0)
        exceptional.push_back(scale * alternating.value());
    return detail::assemble(Ensemble::reverse_circulant, n, scale, std::move(typical), std::move(exceptional));
}

/// Limit CDF of the typical reverse-circulant eigenvalues under the sqrt(2/n)
/// scaling: +-R with R^2 ~ chi-square(2).
[[nodiscard]] inline double reverse_circulant_limit_cdf(double x) noexcept
{
    double const half_mass = 0.5 * chi_square2_cdf(x * x);
    return x >= 0.0 ? 0.5 + half_mass : 0.5 - half_mass;
}

/// Dense symmetric circulant with the given first row (small n only).
[[nodiscard]] inline std::vector<double> circulant_matrix(std::span<double const> first_row)
{
    std::size_t const n = first_row.size();
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a[i * n + j] = first_row[(j + n - i) % n];
    return a;
}

/// Dense reverse circulant R_{ij} = x_{(i+j) mod n} (small n only).
[[nodiscard]] inline std::vector<double> reverse_circulant_matrix(std::span<double const> x)
{
    std::size_t const n = x.size();
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a[i * n + j] = x[(i + j) % n];
    return a;
}

/// Dense palindromic Toeplitz matrix T_{ij} = t_{|i-j|} whose first row
/// t = (c_0, c_1, ..., c_1, c_0) is a palindrome built from c_0..c_{floor((n-1)/2)}.
/// Its leading (n-1) x (n-1) block is the symmetric circulant of size n-1, so
/// it differs from that circulant only in the last row and column.
[[nodiscard]] inline std::vector<double> palindromic_matrix(std::size_t n, SourceSpec const& spec)
{
    if (n < 2)
        throw std::invalid_argument("palindromic matrix needs n >= 2");
    std::vector<double> t(n);
    for (std::size_t l = 0; l < n; ++l)
    {
        std::size_t const mirrored = std::min(l, n - 1 - l);
        t[l] = spec.sample(mirrored + 1);
    }
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a[i * n + j] = t[i > j ? i - j : j - i];
    return a;
}

/// Largest n accepted by the dense palindromic eigensolver.
inline constexpr std::size_t palindromic_dense_limit = 2048;

/// Spectrum of P_n/(sigma sqrt n), P_n the palindromic Toeplitz matrix of the
/// centered inputs. There is no DFT formula, so a dense symmetric solver is
/// used and n is capped. No eigenvalue is singled out as exceptional.
[[nodiscard]] inline Spectrum palindromic_spectrum(std::size_t n, SourceSpec const& spec, Standardization std_ = {})
{
    if (n < 3 || n > palindromic_dense_limit)
        throw std::invalid_argument("palindromic spectrum needs 3 <= n <= " + std::to_string(palindromic_dense_limit));
    if (!(std_.sigma > 0.0))
        throw std::invalid_argument("standardization sigma must be positive");
    auto a = palindromic_matrix(n, spec);
    double const scale = 1.0 / (std_.sigma * std::sqrt(static_cast<double>(n)));
    for (auto& v : a)
        v = (v - std_.mean) * scale;
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(a.data(), n, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("palindromic eigensolver did not converge");
    std::vector<double> values(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
    return detail::assemble(Ensemble::palindromic, n, scale, std::move(values), {});
}

/// Eigenvalues of the (non-symmetric) circulant with first row X_1..X_n,
/// scaled by 1/sqrt n. `eigenvalues` holds the sorted real parts and
/// `complex_values` the full lambda_k in index order.
[[nodiscard]] inline Spectrum raw_circulant_spectrum(std::size_t n, SourceSpec const& spec)
{
    if (n < 1)
        throw std::invalid_argument("raw circulant spectrum needs n >= 1");
    auto const x = spec.draw(n);
    auto lambda = circulant_eigen_dft(x);
    double const scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<double> re(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        lambda[k] *= scale;
        re[k] = lambda[k].real();
    }
    Spectrum sp = detail::assemble(Ensemble::raw_circulant_dft, n, scale, std::move(re), {});
    sp.complex_values = std::move(lambda);
    return sp;
}

/// I_n(2 pi k/n) = (1/n) |sum_{j=1}^n e^{-i j 2 pi k/n} x_j|^2, 1 <= k <= floor((n-1)/2).
///
/// The 1/n normalization makes I_n = (S_{n,k}^2 + T_{n,k}^2)/2 under trig
/// weights and gives the Exp(1) limit law.
[[nodiscard]] inline double periodogram(std::span<double const> x, std::size_t k)
{
    std::size_t const n = x.size();
    if (k < 1 || k > max_trig_rows(n))
        throw std::invalid_argument("periodogram frequency index must satisfy 1 <= k <= floor((n-1)/2)");
    CompensatedSum re, im;
    for (std::size_t j = 1; j <= n; ++j)
    {
        auto const [c, s] = cos_sin_turn(static_cast<std::uint64_t>(j) * k % n, n);
        re.add(c * x[j - 1]);
        im.add(-s * x[j - 1]);
    }
    double const a = re.value();
    double const b = im.value();
    return (a * a + b * b) / static_cast<double>(n);
}

/// All ordinates I_n(2 pi k/n), k = 1..floor((n-1)/2), via one DFT.
[[nodiscard]] inline std::vector<double> periodogram_ordinates(std::span<double const> x)
{
    std::size_t const n = x.size();
    if (n < 3)
        throw std::invalid_argument("periodogram needs n >= 3");
    auto const y = RealDft(n).forward(x);
    std::vector<double> out(max_trig_rows(n));
    for (std::size_t k = 1; k <= out.size(); ++k)
        out[k - 1] = std::norm(y[k]) / static_cast<double>(n);
    return out;
}

/// sup_{x >= 0} |F_n(x) - (1 - e^{-x})| for the periodogram of X_1..X_n.
[[nodiscard]] inline double periodogram_ecdf_distance(std::size_t n, SourceSpec const& spec)
{
    if (n < 7)
        throw std::invalid_argument("periodogram_ecdf_distance needs n >= 7");
    auto const x = spec.draw(n);
    return ks_to(EmpiricalMeasure(periodogram_ordinates(x)), exponential_cdf);
}

} // namespace asclt

#endif
