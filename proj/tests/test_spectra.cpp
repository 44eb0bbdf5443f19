#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "asclt/spectra.hpp"
#include "oracles.hpp"

using namespace asclt;

namespace
{
SourceSpec rademacher(std::uint64_t seed, std::uint64_t stream = 0)
{
    return SourceSpec({Law::rademacher, 0.5}, seed, stream);
}

SourceSpec zero_stream()
{
    return SourceSpec({Law::zero, 0.5}, 0, 0);
}

// Dense circulant C_{ij} = c_{(j - i) mod n}.
std::vector<double> dense_circulant(std::vector<double> const& c)
{
    std::size_t const n = c.size();
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a[i * n + j] = c[(j + n - i) % n];
    return a;
}

double max_abs_diff(std::vector<double> const& a, std::vector<double> const& b)
{
    EXPECT_EQ(a.size(), b.size());
    double d = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

// Greedy nearest matching of two complex multisets; returns the worst distance.
double multiset_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b)
{
    EXPECT_EQ(a.size(), b.size());
    double worst = 0.0;
    std::sort(a.begin(), a.end(), [](auto x, auto y) { return std::abs(x) < std::abs(y); });
    for (auto const& x : a)
    {
        auto it = std::min_element(b.begin(), b.end(),
                                   [&](auto p, auto q) { return std::abs(p - x) < std::abs(q - x); });
        worst = std::max(worst, std::abs(*it - x));
        b.erase(it);
    }
    return worst;
}
} // namespace

TEST(CirculantDft, HandExamples)
{
    std::vector<double> const row{1, 2, 3, 2};
    auto const lambda = circulant_eigen_dft(row);
    std::vector<double> const expect{8, -2, 0, -2};
    for (std::size_t k = 0; k < 4; ++k)
    {
        EXPECT_NEAR(lambda[k].real(), expect[k], 1e-14);
        EXPECT_NEAR(lambda[k].imag(), 0.0, 1e-14);
    }
    auto const dense = oracle::jacobi_eigenvalues(dense_circulant(row), 4);
    EXPECT_LE(max_abs_diff(dense, {-2, -2, 0, 8}), 1e-12);

    std::vector<double> const scalar{2.5, 0, 0, 0, 0, 0, 0};
    for (auto v : circulant_eigen_dft(scalar))
        EXPECT_NEAR(std::abs(v - std::complex<double>(2.5, 0.0)), 0.0, 1e-15);
    EXPECT_THROW((void)circulant_eigen_dft(std::vector<double>{}), std::invalid_argument);
}

TEST(CirculantDft, TraceIdentity)
{
    for (std::size_t n : {1, 5, 64, 1000})
    {
        auto const row = SourceSpec({Law::exponential, 0.5}, n, 0).draw(n);
        std::complex<double> sum{};
        for (auto v : circulant_eigen_dft(row))
            sum += v;
        EXPECT_NEAR(sum.real(), n * row[0], 1e-9 * std::max(1.0, std::abs(n * row[0])));
        EXPECT_NEAR(sum.imag(), 0.0, 1e-9 * n);
    }
}

TEST(CirculantDft, MatchesDenseSolverForSmallRows)
{
    for (std::size_t n = 1; n <= 8; ++n)
        for (std::uint64_t seed = 0; seed < 50; ++seed)
        {
            auto const row = SourceSpec({Law::normal, 0.5}, seed, n).draw(n);
            auto const a = dense_circulant(row);
            Eigen::MatrixXd m(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    m(i, j) = a[i * n + j];
            Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
            std::vector<std::complex<double>> dense(n);
            for (std::size_t k = 0; k < n; ++k)
                dense[k] = solver.eigenvalues()[static_cast<Eigen::Index>(k)];
            EXPECT_LE(multiset_distance(circulant_eigen_dft(row), dense), 1e-9) << "n=" << n << " seed=" << seed;

            // The symmetrized row gives a symmetric matrix: check with Jacobi as well.
            std::vector<double> sym(n);
            for (std::size_t l = 0; l <= n / 2; ++l)
                sym[l] = sym[(n - l) % n] = row[l];
            std::vector<double> expect = oracle::jacobi_eigenvalues(dense_circulant(sym), n);
            std::vector<double> got;
            for (auto v : circulant_eigen_dft(sym))
                got.push_back(v.real());
            std::sort(got.begin(), got.end());
            EXPECT_LE(max_abs_diff(got, expect), 1e-9);
        }
}

TEST(SymmetricCirculant, ZeroStreamGivesZeroSpectrum)
{
    auto const sp = symmetric_circulant_spectrum(17, zero_stream());
    ASSERT_EQ(sp.eigenvalues.size(), 17u);
    for (double v : sp.eigenvalues)
        EXPECT_EQ(v, 0.0);
}

TEST(SymmetricCirculant, MatchesDenseOracle)
{
    for (std::size_t n : {3, 4, 5, 6, 7, 8})
        for (std::uint64_t seed = 0; seed < 10; ++seed)
        {
            auto const spec = SourceSpec({Law::uniform, 0.5}, seed, 0);
            Standardization const st{0.2, 1.5};
            std::vector<double> c(n);
            for (std::size_t l = 0; l <= n / 2; ++l)
                c[l] = c[(n - l) % n] = (spec.sample(l + 1) - st.mean) / st.sigma / std::sqrt(static_cast<double>(n));
            auto const expect = oracle::jacobi_eigenvalues(dense_circulant(c), n);
            auto const sp = symmetric_circulant_spectrum(n, spec, st);
            EXPECT_LE(max_abs_diff(sp.eigenvalues, expect), 1e-9) << n;
            EXPECT_LE(sp.max_imag_residual, 1e-9);
            EXPECT_EQ(sp.exceptional.size(), n % 2 == 0 ? 2u : 1u);
            EXPECT_EQ(sp.typical.size() + sp.exceptional.size(), n);
        }
}

TEST(SymmetricCirculant, RejectsBadArguments)
{
    EXPECT_THROW((void)symmetric_circulant_spectrum(2, rademacher(1)), std::invalid_argument);
    EXPECT_THROW((void)symmetric_circulant_spectrum(9, rademacher(1), {0.0, 0.0}), std::invalid_argument);
    EXPECT_THROW((void)symmetric_circulant_spectrum(9, rademacher(1), {0.0, -1.0}), std::invalid_argument);
}

TEST(SymmetricCirculant, PairedEigenvaluesEqualTrigSums)
{
    std::size_t const n = 4097;
    auto const spec = rademacher(2718);
    auto const sp = symmetric_circulant_spectrum(n, spec);
    EXPECT_LE(sp.max_imag_residual, 1e-9);
    ASSERT_EQ(sp.exceptional.size(), 1u);
    ASSERT_EQ(sp.typical.size(), n - 1);

    // Feed the symmetrized row through the trig weights: X_j = c_{j mod n}.
    std::vector<double> c(n);
    for (std::size_t l = 0; l <= n / 2; ++l)
        c[l] = c[(n - l) % n] = spec.sample(l + 1);
    std::vector<double> x(n);
    for (std::size_t j = 1; j <= n; ++j)
        x[j - 1] = c[j % n];
    std::size_t const r = max_trig_rows(n);
    auto const ps = partial_sums(make_trig_pair(n, r), x, SumPath::naive);
    std::vector<double> expect;
    for (std::size_t k = 0; k < r; ++k)
    {
        expect.push_back(ps.s[k] / std::sqrt(2.0));
        expect.push_back(ps.s[k] / std::sqrt(2.0));
    }
    std::sort(expect.begin(), expect.end());
    EXPECT_LE(max_abs_diff(sp.typical, expect), 1e-9);
    // Multiplicity two: sorted typical values come in equal adjacent pairs.
    for (std::size_t i = 0; i + 1 < sp.typical.size(); i += 2)
        EXPECT_NEAR(sp.typical[i], sp.typical[i + 1], 1e-9);
}

TEST(SymmetricCirculant, CenteringMovesAtMostOneEigenvalue)
{
    for (std::size_t n : {101, 1000, 4097})
    {
        auto const spec = SourceSpec({Law::two_point, 0.3}, 5, 0);
        auto const plain = symmetric_circulant_spectrum(n, spec);
        auto const centered = symmetric_circulant_spectrum(n, spec, {0.7, 1.0});
        std::vector<double> rest = plain.eigenvalues;
        std::size_t unmatched = 0;
        for (double v : centered.eigenvalues)
        {
            auto it = std::min_element(rest.begin(), rest.end(),
                                       [&](double a, double b) { return std::abs(a - v) < std::abs(b - v); });
            if (std::abs(*it - v) <= 1e-9)
                rest.erase(it);
            else
                ++unmatched;
        }
        EXPECT_EQ(unmatched, 1u) << n;
        EXPECT_LE(max_abs_diff(plain.typical, centered.typical), 1e-9);
    }
}

TEST(ReverseCirculant, ZeroStream)
{
    auto const sp = reverse_circulant_spectrum(12, zero_stream());
    for (double v : sp.eigenvalues)
        EXPECT_EQ(v, 0.0);
}

TEST(ReverseCirculant, MatchesDenseOracle)
{
    for (std::size_t n : {3, 4, 5, 6, 7, 8})
        for (std::uint64_t seed = 0; seed < 10; ++seed)
        {
            auto const spec = SourceSpec({Law::normal, 0.5}, seed, 1);
            auto const x = spec.draw(n);
            double const scale = std::sqrt(2.0 / static_cast<double>(n));
            std::vector<double> a(n * n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    a[i * n + j] = scale * x[(i + j) % n];
            auto const expect = oracle::jacobi_eigenvalues(a, n);
            auto const sp = reverse_circulant_spectrum(n, spec);
            EXPECT_LE(max_abs_diff(sp.eigenvalues, expect), 1e-9) << n;
            EXPECT_EQ(sp.exceptional.size(), n % 2 == 0 ? 2u : 1u);
        }
}

TEST(ReverseCirculant, TypicalSpectrumIsSymmetric)
{
    auto const sp = reverse_circulant_spectrum(1001, SourceSpec({Law::exponential, 0.5}, 3, 0));
    std::vector<double> negated(sp.typical.rbegin(), sp.typical.rend());
    for (double& v : negated)
        v = -v;
    EXPECT_EQ(negated, sp.typical);
}

TEST(ReverseCirculant, PairsMatchTransformAndChiSquareLimit)
{
    std::size_t const n = 4097;
    auto const spec = rademacher(99);
    auto const sp = reverse_circulant_spectrum(n, spec);
    std::size_t const r = max_trig_rows(n);
    auto const ps = partial_sums(make_trig_pair(n, r), spec.draw(n), SumPath::naive);
    std::vector<double> mags, squares;
    for (std::size_t k = 0; k < r; ++k)
    {
        double const m = std::sqrt(ps.s[k] * ps.s[k] + (*ps.t)[k] * (*ps.t)[k]);
        mags.push_back(m);
        mags.push_back(-m);
        squares.push_back(m * m);
    }
    std::sort(mags.begin(), mags.end());
    EXPECT_LE(max_abs_diff(sp.typical, mags), 1e-9);
    auto chi2 = [](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x / 2.0); };
    EXPECT_LE(ks_to(EmpiricalMeasure(squares), chi2), 0.03);
    EXPECT_NEAR(reverse_circulant_limit_cdf(0.0), 0.5, 1e-16);
    EXPECT_NEAR(reverse_circulant_limit_cdf(2.0) + reverse_circulant_limit_cdf(-2.0), 1.0, 1e-15);
}

TEST(Palindromic, MatchesDenseOracle)
{
    for (std::size_t n : {3, 4, 5, 7, 8})
    {
        auto const spec = SourceSpec({Law::uniform, 0.5}, n, 0);
        Standardization const st{0.1, 2.0};
        std::vector<double> t(n);
        for (std::size_t l = 0; l < n; ++l)
            t[l] = (spec.sample(std::min(l, n - 1 - l) + 1) - st.mean) / (st.sigma * std::sqrt(static_cast<double>(n)));
        std::vector<double> a(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                a[i * n + j] = t[i > j ? i - j : j - i];
        auto const expect = oracle::jacobi_eigenvalues(a, n);
        auto const sp = palindromic_spectrum(n, spec, st);
        EXPECT_LE(max_abs_diff(sp.eigenvalues, expect), 1e-9) << n;
        EXPECT_TRUE(sp.exceptional.empty());
    }
    EXPECT_THROW((void)palindromic_spectrum(palindromic_dense_limit + 1, rademacher(1)), std::invalid_argument);
}

TEST(RawCirculant, ComplexValuesMatchDenseSolver)
{
    std::size_t const n = 6;
    auto const spec = SourceSpec({Law::normal, 0.5}, 8, 0);
    auto const x = spec.draw(n);
    auto const a = dense_circulant(x);
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = a[i * n + j] / std::sqrt(static_cast<double>(n));
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
    std::vector<std::complex<double>> dense(n);
    for (std::size_t k = 0; k < n; ++k)
        dense[k] = solver.eigenvalues()[static_cast<Eigen::Index>(k)];
    auto const sp = raw_circulant_spectrum(n, spec);
    EXPECT_LE(multiset_distance(sp.complex_values, dense), 1e-9);
    EXPECT_EQ(sp.eigenvalues.size(), n);
}

TEST(Periodogram, HandExamples)
{
    std::size_t const n = 16;
    std::vector<double> ones(n, 1.0);
    for (std::size_t k = 1; k <= 7; ++k)
        EXPECT_NEAR(periodogram(ones, k), 0.0, 1e-28);
    std::size_t const k0 = 3;
    std::vector<double> wave(n);
    for (std::size_t j = 1; j <= n; ++j)
        wave[j - 1] = std::cos(2.0 * std::numbers::pi * static_cast<double>(j * k0) / n);
    EXPECT_NEAR(periodogram(wave, k0), n / 4.0, 1e-12);
    EXPECT_THROW((void)periodogram(wave, 0), std::invalid_argument);
    EXPECT_THROW((void)periodogram(wave, 8), std::invalid_argument);
}

TEST(Periodogram, EqualsHalfSquaredTrigSums)
{
    for (std::size_t n : {7, 64, 333, 2048})
    {
        auto const x = SourceSpec({Law::exponential, 0.5}, n, 0).draw(n);
        std::size_t const r = max_trig_rows(n);
        auto const ps = partial_sums(make_trig_pair(n, r), x, SumPath::naive);
        auto const all = periodogram_ordinates(x);
        ASSERT_EQ(all.size(), r);
        for (std::size_t k = 1; k <= r; ++k)
        {
            double const expect = 0.5 * (ps.s[k - 1] * ps.s[k - 1] + (*ps.t)[k - 1] * (*ps.t)[k - 1]);
            double const single = periodogram(x, k);
            EXPECT_NEAR(single, expect, 1e-9 * std::max(1.0, expect));
            EXPECT_NEAR(all[k - 1], expect, 1e-9 * std::max(1.0, expect));
            EXPECT_GE(single, 0.0);
            EXPECT_GE(all[k - 1], 0.0);
        }
    }
}

TEST(Periodogram, EcdfDistanceToExponential)
{
    std::size_t const n = 1 << 14;
    EXPECT_LE(periodogram_ecdf_distance(n, SourceSpec({Law::normal, 0.5}, 1, 0)), 0.03);
    EXPECT_LE(periodogram_ecdf_distance(n, rademacher(1)), 0.03);
    EXPECT_EQ(periodogram_ecdf_distance(n, zero_stream()), 1.0);
    EXPECT_THROW((void)periodogram_ecdf_distance(6, rademacher(1)), std::invalid_argument);
}

TEST(Ensembles, Names)
{
    EXPECT_EQ(ensemble_name(Ensemble::symmetric_circulant), "symmetric_circulant");
    EXPECT_EQ(ensemble_name(Ensemble::reverse_circulant), "reverse_circulant");
    EXPECT_EQ(ensemble_name(Ensemble::palindromic), "palindromic");
    EXPECT_EQ(ensemble_name(Ensemble::raw_circulant_dft), "raw_circulant_dft");
}
