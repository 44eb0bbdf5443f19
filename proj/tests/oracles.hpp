#ifndef ASCLT_TESTS_ORACLES_HPP
#define ASCLT_TESTS_ORACLES_HPP

// Independent reference computations used only by the tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace oracle
{

/// Eigenvalues of a dense symmetric matrix (row-major) by cyclic Jacobi
/// rotations, ascending.
inline std::vector<double> jacobi_eigenvalues(std::vector<double> a, std::size_t n)
{
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    for (int sweep = 0; sweep < 100; ++sweep)
    {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                off += at(i, j) * at(i, j);
        if (off < 1e-30)
            break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
            {
                if (std::abs(at(p, q)) < 1e-300)
                    continue;
                double const theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
                double const t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double const c = 1.0 / std::sqrt(t * t + 1.0);
                double const s = t * c;
                for (std::size_t k = 0; k < n; ++k)
                {
                    double const akp = at(k, p);
                    double const akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k)
                {
                    double const apk = at(p, k);
                    double const aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i)
        ev[i] = at(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Composite Simpson rule with `panels` (even) subintervals.
template <class F>
double simpson(F&& f, double a, double b, std::size_t panels)
{
    if (panels % 2 == 1)
        ++panels;
    double const h = (b - a) / static_cast<double>(panels);
    double sum = f(a) + f(b);
    for (std::size_t i = 1; i < panels; ++i)
        sum += (i % 2 == 1 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
    return sum * h / 3.0;
}

/// Forward DFT X_k = sum_j x_j e^{-2 pi i jk/n}, evaluated in long double.
inline std::vector<std::complex<double>> dft(std::vector<std::complex<double>> const& x)
{
    std::size_t const n = x.size();
    std::vector<std::complex<double>> out(n);
    long double const w = 2.0L * std::numbers::pi_v<long double> / static_cast<long double>(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        long double re = 0.0L, im = 0.0L;
        for (std::size_t j = 0; j < n; ++j)
        {
            long double const a = w * static_cast<long double>((j * k) % n);
            long double const c = std::cos(a), s = std::sin(a);
            re += x[j].real() * c + x[j].imag() * s;
            im += x[j].imag() * c - x[j].real() * s;
        }
        out[k] = {static_cast<double>(re), static_cast<double>(im)};
    }
    return out;
}

inline double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    std::size_t const m = v.size();
    return m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

} // namespace oracle

#endif
