#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "asclt/empirical.hpp"
#include "asclt/transform.hpp"
#include "oracles.hpp"

using namespace asclt;

namespace
{
SourceSpec normal_spec(std::uint64_t seed, std::uint64_t stream = 0)
{
    return SourceSpec({Law::normal, 0.5}, seed, stream);
}

double normal_quantile(double p)
{
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i)
    {
        double const mid = 0.5 * (lo + hi);
        (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Pooled S and T values of one Gaussian-oracle draw.
std::vector<double> gaussian_oracle_values(std::size_t m, std::uint64_t seed)
{
    std::size_t const n = 2 * m + 1;
    auto const ps = gaussian_oracle_sums(n, m, normal_spec(seed));
    return ps.s;
}
} // namespace

TEST(PartialSums, ConstantInputVanishes)
{
    auto const w = make_trig_pair(9, 4);
    std::vector<double> x(9, 1.0);
    for (auto path : {SumPath::naive, SumPath::fast})
    {
        auto const ps = partial_sums(w, x, path);
        ASSERT_TRUE(ps.t.has_value());
        for (std::size_t k = 0; k < 4; ++k)
        {
            EXPECT_NEAR(ps.s[k], 0.0, 1e-15);
            EXPECT_NEAR((*ps.t)[k], 0.0, 1e-15);
        }
    }
}

TEST(PartialSums, CoordinateProjection)
{
    std::vector<double> row(6, 0.0);
    row[0] = 1.0;
    auto const w = WeightMatrixPair::dense(WeightKind::custom, 1, 6, row);
    std::vector<double> x{3.5, -1, 2, 7, 8, 9};
    auto const ps = partial_sums_naive(w, x);
    EXPECT_EQ(ps.s[0], 3.5);
    EXPECT_FALSE(ps.t.has_value());
}

TEST(PartialSums, SingleIndicatorInput)
{
    auto const w = make_trig_pair(8, 3);
    std::vector<double> x(8, 0.0);
    x[1] = 1.0;
    auto const naive = partial_sums_naive(w, x);
    auto const fast = partial_sums_fast(8, 3, x);
    std::vector<double> const expect{0.0, -0.5, 0.0};
    for (std::size_t k = 0; k < 3; ++k)
    {
        EXPECT_NEAR(naive.s[k], expect[k], 1e-16);
        EXPECT_NEAR(fast.s[k], expect[k], 1e-16);
        EXPECT_NEAR((*fast.t)[k], (*naive.t)[k], 1e-16);
    }
}

TEST(PartialSums, DimensionMismatchIsRejected)
{
    auto const w = make_trig_pair(8, 3);
    std::vector<double> x(7, 0.0);
    EXPECT_THROW((void)partial_sums_naive(w, x), std::invalid_argument);
    EXPECT_THROW((void)partial_sums_fast(8, 3, x), std::invalid_argument);
    auto const dense = WeightMatrixPair::dense(WeightKind::custom, 1, 7, std::vector<double>(7, 1.0));
    EXPECT_THROW((void)partial_sums(dense, x, SumPath::fast), std::invalid_argument);
}

TEST(PartialSums, FastMatchesNaiveOnRandomInstances)
{
    std::mt19937_64 gen(20240611);
    std::uniform_int_distribution<std::size_t> pick_n(3, 512);
    for (int trial = 0; trial < 200; ++trial)
    {
        std::size_t const n = pick_n(gen);
        std::size_t const r = std::uniform_int_distribution<std::size_t>(1, max_trig_rows(n))(gen);
        auto const spec = SourceSpec({Law::exponential, 0.5}, gen(), 0);
        auto const x = spec.draw(n);
        auto const w = make_trig_pair(n, r);
        auto const naive = partial_sums(w, x, SumPath::naive);
        auto const fast = partial_sums(w, x, SumPath::fast);
        double worst = 0.0;
        for (std::size_t k = 0; k < r; ++k)
        {
            worst = std::max(worst, std::abs(naive.s[k] - fast.s[k]));
            worst = std::max(worst, std::abs((*naive.t)[k] - (*fast.t)[k]));
        }
        EXPECT_LE(worst, 1e-9 * std::sqrt(static_cast<double>(n))) << "n=" << n << " r=" << r;
    }
}

TEST(PartialSums, FastMatchesNaiveAtLargePowerOfTwo)
{
    std::size_t const n = 1 << 14, r = 8191;
    auto const w = make_trig_pair(n, r);
    auto const x = SourceSpec({Law::rademacher, 0.5}, 3, 0).draw(n);
    auto const naive = partial_sums(w, x, SumPath::naive);
    auto const fast = partial_sums(w, x, SumPath::fast);
    double worst = 0.0;
    for (std::size_t k = 0; k < r; ++k)
        worst = std::max({worst, std::abs(naive.s[k] - fast.s[k]), std::abs((*naive.t)[k] - (*fast.t)[k])});
    EXPECT_LE(worst, 1e-9 * std::sqrt(static_cast<double>(n)));
}

TEST(PartialSums, Linearity)
{
    std::size_t const n = 301, r = 150;
    auto const w = make_trig_pair(n, r);
    auto const x = normal_spec(1).draw(n);
    auto const y = normal_spec(2).draw(n);
    double const a = 1.75, b = -0.3;
    std::vector<double> z(n);
    for (std::size_t j = 0; j < n; ++j)
        z[j] = a * x[j] + b * y[j];
    for (auto path : {SumPath::naive, SumPath::fast})
    {
        auto const px = partial_sums(w, x, path);
        auto const py = partial_sums(w, y, path);
        auto const pz = partial_sums(w, z, path);
        for (std::size_t k = 0; k < r; ++k)
        {
            double const expect = a * px.s[k] + b * py.s[k];
            EXPECT_NEAR(pz.s[k], expect, 1e-12 * std::max(1.0, std::abs(expect)));
        }
    }
}

TEST(PartialSums, ParsevalBound)
{
    for (std::size_t n : {3, 11, 101, 1001, 4097})
    {
        std::size_t const r = max_trig_rows(n);
        auto const x = SourceSpec({Law::uniform, 0.5}, n, 0).draw(n);
        auto const ps = partial_sums(make_trig_pair(n, r), x);
        double energy = 0.0, input = 0.0;
        for (std::size_t k = 0; k < r; ++k)
            energy += ps.s[k] * ps.s[k] + (*ps.t)[k] * (*ps.t)[k];
        for (double v : x)
            input += v * v;
        EXPECT_LE(energy, 2.0 * input + 1e-6) << n;
    }
}

TEST(PartialSums, ProvenanceRecordsSource)
{
    auto const spec = SourceSpec({Law::rademacher, 0.5}, 42, 7);
    auto const ps = partial_sums(make_trig_pair(16, 7), spec);
    ASSERT_TRUE(ps.provenance.has_value());
    EXPECT_EQ(ps.provenance->master_seed, 42u);
    EXPECT_EQ(ps.provenance->stream_id, 7u);
    EXPECT_EQ(ps.provenance->kind, WeightKind::trig);
}

TEST(GaussianOracle, IsDeterministic)
{
    auto const a = gaussian_oracle_sums(8, 3, normal_spec(5));
    auto const b = gaussian_oracle_sums(8, 3, normal_spec(5));
    EXPECT_EQ(a.s, b.s);
    EXPECT_EQ(*a.t, *b.t);
    EXPECT_THROW((void)gaussian_oracle_sums(8, 3, SourceSpec()), std::invalid_argument);
}

TEST(GaussianOracle, SumsAreIndependentStandardNormals)
{
    int const reps = 100000;
    double m1 = 0, m2 = 0, v1 = 0, v2 = 0, c12 = 0;
    std::vector<double> means(8, 0.0);
    for (int i = 0; i < reps; ++i)
    {
        auto const ps = gaussian_oracle_sums(64, 8, normal_spec(17, static_cast<std::uint64_t>(i)));
        m1 += ps.s[0];
        m2 += ps.s[1];
        v1 += ps.s[0] * ps.s[0];
        v2 += ps.s[1] * ps.s[1];
        c12 += ps.s[0] * ps.s[1];
        for (std::size_t k = 0; k < 8; ++k)
            means[k] += ps.s[k];
    }
    double const n = reps;
    m1 /= n;
    m2 /= n;
    EXPECT_NEAR(v1 / n - m1 * m1, 1.0, 0.02);
    EXPECT_NEAR(v2 / n - m2 * m2, 1.0, 0.02);
    EXPECT_NEAR(c12 / n - m1 * m2, 0.0, 0.02);
    for (double m : means)
        EXPECT_LE(std::abs(m / n), 5.0 / std::sqrt(n));
}

TEST(NormalCdf, SymmetryAndKnownValue)
{
    EXPECT_EQ(normal_cdf(0.0), 0.5);
    for (double x : {0.5, 1.0, 2.0, 5.0})
        EXPECT_NEAR(normal_cdf(-x), 1.0 - normal_cdf(x), 1e-14);
    double const quad =
        0.5 + oracle::simpson([](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); }, 0.0,
                              1.96, 2000);
    EXPECT_NEAR(normal_cdf(1.96), quad, 1e-12);
    EXPECT_NEAR(normal_cdf(1.96), 0.975002, 1e-6);
}

TEST(NormalCdf, AgreesWithQuadratureAcrossRange)
{
    for (double x = -8.0; x <= 8.0; x += 0.25)
    {
        auto phi = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); };
        double const quad = x <= 0.0 ? oracle::simpson(phi, -40.0, x, 40000) : 1.0 - oracle::simpson(phi, x, 40.0, 40000);
        EXPECT_NEAR(normal_cdf(x), quad, 1e-12) << x;
    }
}

TEST(NormalCdf, MonotoneAndBounded)
{
    double prev = 0.0;
    for (int i = 0; i <= 100000; ++i)
    {
        double const x = -8.0 + 16.0 * i / 100000.0;
        double const v = normal_cdf(x);
        ASSERT_GE(v, prev);
        ASSERT_LE(v, 1.0);
        prev = v;
    }
}

TEST(OtherCdfs, ClosedForms)
{
    EXPECT_EQ(exponential_cdf(-1.0), 0.0);
    EXPECT_NEAR(exponential_cdf(1.0), 1.0 - std::exp(-1.0), 1e-16);
    EXPECT_EQ(chi_square2_cdf(0.0), 0.0);
    EXPECT_NEAR(chi_square2_cdf(2.0), 1.0 - std::exp(-1.0), 1e-16);
    EXPECT_NEAR(normal_pdf(0.0), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-16);
    EXPECT_NEAR(normal_interval_probability(-1.0, 1.0), std::erf(1.0 / std::sqrt(2.0)), 1e-15);
}

TEST(Ecdf, HandExamples)
{
    EmpiricalMeasure const single({0.0});
    EXPECT_EQ(ecdf(single, -1.0), 0.0);
    EXPECT_EQ(ecdf(single, 0.0), 1.0);
    EmpiricalMeasure const three({3.0, 1.0, 2.0});
    EXPECT_DOUBLE_EQ(ecdf(three, 2.0), 2.0 / 3.0);
    EXPECT_EQ(three.values()[0], 1.0);
}

TEST(Ecdf, GaussianOracleSampleIsCentered)
{
    EmpiricalMeasure const mu(gaussian_oracle_values(10000, 8));
    EXPECT_NEAR(ecdf(mu, 0.0), 0.5, 0.02);
}

TEST(EmpiricalMeasureType, RejectsBadAtoms)
{
    EXPECT_THROW(EmpiricalMeasure({}), std::invalid_argument);
    EXPECT_THROW(EmpiricalMeasure({1.0, std::numeric_limits<double>::infinity()}), std::invalid_argument);
}

TEST(KsDistance, HandExamples)
{
    EmpiricalMeasure const single({0.0});
    EXPECT_EQ(ks_to(single, normal_cdf), 0.5);
    EXPECT_EQ(ks_to(single, exponential_cdf), 1.0);
}

TEST(KsDistance, QuantileGridGivesHalfStep)
{
    std::size_t const m = 100;
    std::vector<double> q(m);
    for (std::size_t i = 1; i <= m; ++i)
        q[i - 1] = normal_quantile((static_cast<double>(i) - 0.5) / m);
    EXPECT_NEAR(ks_to(EmpiricalMeasure(q), normal_cdf), 0.005, 1e-12);
}

TEST(KsDistance, MatchesBruteForceAndIgnoresOrder)
{
    auto values = SourceSpec({Law::uniform, 0.5}, 3, 0).draw(500);
    double const ks = ks_to(EmpiricalMeasure(values), normal_cdf);
    // Brute force: sup over a fine grid plus both sides of every atom.
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    double brute = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i)
    {
        double const f = 0.5 * std::erfc(-sorted[i] / std::sqrt(2.0));
        brute = std::max({brute, std::abs((i + 1.0) / 500.0 - f), std::abs(i / 500.0 - f)});
    }
    EXPECT_NEAR(ks, brute, 1e-14);
    std::mt19937 gen(1);
    for (int rep = 0; rep < 5; ++rep)
    {
        std::shuffle(values.begin(), values.end(), gen);
        EXPECT_EQ(ks_to(EmpiricalMeasure(values), normal_cdf), ks);
    }
}

TEST(KsDistance, DkwBandHoldsForGaussianOracle)
{
    std::size_t const m = 1000;
    int within = 0;
    for (std::uint64_t rep = 0; rep < 200; ++rep)
    {
        EmpiricalMeasure const mu(gaussian_oracle_values(m, 1000 + rep));
        within += ks_to(mu, normal_cdf) <= 1.36 / std::sqrt(static_cast<double>(m));
    }
    EXPECT_GE(within, 180);
}

TEST(JointCdf, HandExamples)
{
    std::vector<double> s{0.0}, t{0.0};
    EXPECT_EQ(joint_cdf(s, t, 1.0, 1.0), 1.0);
    EXPECT_EQ(joint_cdf(s, t, 1.0, -1.0), 0.0);
    std::vector<double> shorter;
    EXPECT_THROW((void)joint_cdf(s, shorter, 0.0, 0.0), std::invalid_argument);
}

TEST(JointCdf, GaussianOraclePairsAtOrigin)
{
    auto const ps = gaussian_oracle_sums(20001, 10000, normal_spec(31));
    EXPECT_NEAR(joint_cdf(ps.s, *ps.t, 0.0, 0.0), 0.25, 0.02);
}

TEST(EmpiricalChar, HandExamples)
{
    EmpiricalMeasure const single({0.0});
    EXPECT_EQ(empirical_char(single, 3.0), std::complex<double>(1.0, 0.0));
    std::vector<double> s{0.0}, t{0.0};
    EXPECT_EQ(empirical_char(s, t, 2.0, -1.0), std::complex<double>(1.0, 0.0));
    EmpiricalMeasure const mu(SourceSpec({Law::exponential, 0.5}, 1, 0).draw(1000));
    EXPECT_EQ(empirical_char(mu, 0.0), std::complex<double>(1.0, 0.0));
    for (double theta : {0.1, 1.0, 10.0, 100.0})
        EXPECT_LE(std::abs(empirical_char(mu, theta)), 1.0 + 1e-15);
}

TEST(EmpiricalChar, GaussianOracleApproachesGaussianTransform)
{
    auto const ps = gaussian_oracle_sums(200001, 100000, normal_spec(13));
    auto const phi = empirical_char(ps.s, *ps.t, 1.0, 0.0);
    EXPECT_LE(std::abs(phi - std::exp(-0.5)), 0.01);
}

TEST(RateFunction, GaussianClosedForm)
{
    EXPECT_EQ(rate_function_gaussian(0.0, 1.0).value, 0.0);
    EXPECT_NEAR(rate_function_gaussian(1.0, 1.0).value, 0.5, 1e-15);
    EXPECT_NEAR(rate_function_gaussian(0.5, 1.0).value, 0.125, 1e-15);
    EXPECT_THROW((void)rate_function_gaussian(0.0, 0.0), std::invalid_argument);
    for (double m = -2.0; m <= 2.0; m += 0.5)
        for (double s2 = 0.25; s2 <= 4.0; s2 *= 2.0)
        {
            if (m != 0.0 || s2 != 1.0)
            {
                EXPECT_GT(rate_function_gaussian(m, s2).value, 0.0);
            }
        }
}

TEST(RateFunction, ClosedFormMatchesQuadrature)
{
    auto kl = [](double m, double s2) {
        double const s = std::sqrt(s2);
        auto f = [&](double x) {
            double const z = (x - m) / s;
            double const log_f = -0.5 * z * z - std::log(s) - 0.5 * std::log(2.0 * std::numbers::pi);
            double const log_phi = -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi);
            return std::exp(log_f) * (log_f - log_phi);
        };
        return oracle::simpson(f, m - 40.0 * s, m + 40.0 * s, 80000);
    };
    for (auto [m, s2] : {std::pair{1.0, 1.0}, std::pair{0.5, 1.0}, std::pair{-0.3, 2.5}, std::pair{0.2, 0.4}})
        EXPECT_NEAR(rate_function_gaussian(m, s2).value, kl(m, s2), 1e-9);
}

TEST(RateFunction, HistogramEstimate)
{
    auto const x = normal_spec(101).draw(1'000'000);
    auto const est = rate_function_estimate(EmpiricalMeasure(x), 64);
    EXPECT_EQ(est.method, RateMethod::histogram_estimate);
    EXPECT_LE(est.value, 0.01);
    std::vector<double> shifted(x);
    for (double& v : shifted)
        v += 1.0;
    EXPECT_NEAR(rate_function_estimate(EmpiricalMeasure(shifted), 64).value, 0.5, 0.1);
    EXPECT_EQ(rate_function_estimate(EmpiricalMeasure(std::vector<double>(100, 2.0)), 10).value,
              std::numeric_limits<double>::infinity());
    EXPECT_THROW((void)rate_function_estimate(EmpiricalMeasure({1.0, 2.0}), 10), std::invalid_argument);
}

TEST(MeasureCsv, RoundTrip)
{
    EmpiricalMeasure const mu(normal_spec(9).draw(257));
    std::ostringstream out;
    write_measure_csv(mu, out);
    EXPECT_EQ(out.str().substr(0, 6), "value\n");
    std::istringstream in(out.str());
    auto const back = read_measure_csv(in);
    ASSERT_EQ(back.size(), mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i)
        EXPECT_EQ(back.values()[i], mu.values()[i]);
    std::istringstream headerless("2\n1\n");
    EXPECT_EQ(read_measure_csv(headerless).values()[0], 1.0);
    std::istringstream bad("value\n1\nx\n");
    EXPECT_THROW((void)read_measure_csv(bad), std::invalid_argument);
}
