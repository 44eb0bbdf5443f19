#ifndef ASCLT_EMPIRICAL_HPP
#define ASCLT_EMPIRICAL_HPP

// Empirical measures mu = (1/m) sum_k delta_{v_k} and the statistics the
// experiments compare against their limits: ECDF, exact Kolmogorov-Smirnov
// distance, bivariate joint CDF, empirical characteristic function and the
// relative entropy I(nu) = int f ln(f/phi) with respect to N(0,1).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "asclt/numeric.hpp"

namespace asclt
{

/// Standard normal CDF through the complementary error function; absolute
/// error well below 1e-15 on the whole line.
[[nodiscard]] inline double normal_cdf(double x) noexcept
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

[[nodiscard]] inline double normal_pdf(double x) noexcept
{
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

/// P(a < Z <= b) for Z ~ N(0,1), evaluated on the tail side to avoid cancellation.
[[nodiscard]] inline double normal_interval_probability(double a, double b) noexcept
{
    if (a >= 0.0)
        return normal_cdf(-a) - normal_cdf(-b);
    return normal_cdf(b) - normal_cdf(a);
}

/// (1 - e^{-x})_+, the standard exponential law.
[[nodiscard]] inline double exponential_cdf(double x) noexcept
{
    return x <= 0.0 ? 0.0 : -std::expm1(-x);
}

/// (1 - e^{-x/2})_+, chi-square with two degrees of freedom.
[[nodiscard]] inline double chi_square2_cdf(double x) noexcept
{
    return x <= 0.0 ? 0.0 : -std::expm1(-0.5 * x);
}

class EmpiricalMeasure
{
  public:
    explicit EmpiricalMeasure(std::vector<double> values) : values_{std::move(values)}
    {
        if (values_.empty())
            throw std::invalid_argument("empirical measure needs at least one atom");
        if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); }))
            throw std::invalid_argument("empirical measure atoms must be finite");
        std::sort(values_.begin(), values_.end());
    }

    [[nodiscard]] std::span<double const> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

  private:
    std::vector<double> values_;
};

/// One atom per line, 17 significant digits, header "value".
inline void write_measure_csv(EmpiricalMeasure const& mu, std::ostream& out)
{
    out << "value\n";
    char buf[32];
    for (double v : mu.values())
    {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf << '\n';
    }
}

/// Reads what write_measure_csv writes; the header line is optional.
[[nodiscard]] inline EmpiricalMeasure read_measure_csv(std::istream& in)
{
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || (line_no == 1 && line == "value"))
            continue;
        std::size_t used = 0;
        double v = 0.0;
        try
        {
            v = std::stod(line, &used);
        }
        catch (std::exception const&)
        {
            used = 0;
        }
        if (used != line.size())
            throw std::invalid_argument("measure CSV line " + std::to_string(line_no) + ": bad number '" + line + "'");
        values.push_back(v);
    }
    return EmpiricalMeasure(std::move(values));
}

/// #{v <= x} / m.
[[nodiscard]] inline double ecdf(EmpiricalMeasure const& mu, double x) noexcept
{
    auto const v = mu.values();
    auto const count = std::upper_bound(v.begin(), v.end(), x) - v.begin();
    return static_cast<double>(count) / static_cast<double>(v.size());
}

/// sup_x |F_m(x) - F(x)| for a continuous F, evaluated exactly at the corners
/// of the ECDF staircase.
template <class Cdf>
[[nodiscard]] double ks_to(EmpiricalMeasure const& mu, Cdf&& cdf)
{
    auto const v = mu.values();
    double const m = static_cast<double>(v.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        double const f = cdf(v[i]);
        double const above = static_cast<double>(i + 1) / m - f;
        double const below = f - static_cast<double>(i) / m;
        worst = std::max({worst, std::abs(above), std::abs(below)});
    }
    return worst;
}

/// Fraction of pairs with s_k <= x and t_k <= y.
[[nodiscard]] inline double joint_cdf(std::span<double const> s, std::span<double const> t, double x, double y)
{
    if (s.size() != t.size() || s.empty())
        throw std::invalid_argument("joint_cdf needs two nonempty sequences of equal length");
    std::size_t count = 0;
    for (std::size_t k = 0; k < s.size(); ++k)
        count += (s[k] <= x && t[k] <= y) ? 1 : 0;
    return static_cast<double>(count) / static_cast<double>(s.size());
}

/// (1/m) sum_k exp(i theta v_k).
[[nodiscard]] inline std::complex<double> empirical_char(EmpiricalMeasure const& mu, double theta)
{
    CompensatedSum re, im;
    for (double v : mu.values())
    {
        re.add(std::cos(theta * v));
        im.add(std::sin(theta * v));
    }
    double const m = static_cast<double>(mu.size());
    return {re.value() / m, im.value() / m};
}

/// (1/m) sum_k exp(i (a s_k + b t_k)).
[[nodiscard]] inline std::complex<double> empirical_char(std::span<double const> s, std::span<double const> t,
                                                         double a, double b)
{
    if (s.size() != t.size() || s.empty())
        throw std::invalid_argument("empirical_char needs two nonempty sequences of equal length");
    CompensatedSum re, im;
    for (std::size_t k = 0; k < s.size(); ++k)
    {
        double const phase = a * s[k] + b * t[k];
        re.add(std::cos(phase));
        im.add(std::sin(phase));
    }
    double const m = static_cast<double>(s.size());
    return {re.value() / m, im.value() / m};
}

enum class RateMethod : std::uint8_t
{
    gaussian_closed_form,
    histogram_estimate,
};

struct RateValue
{
    double value = 0.0; ///< may be +infinity
    RateMethod method = RateMethod::gaussian_closed_form;
};

/// I(N(m, sigma2)) = (sigma2 + m^2 - 1 - ln sigma2) / 2.
[[nodiscard]] inline RateValue rate_function_gaussian(double m, double sigma2)
{
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("rate_function_gaussian needs sigma2 > 0");
    return {0.5 * (sigma2 + m * m - 1.0 - std::log(sigma2)), RateMethod::gaussian_closed_form};
}

/// Histogram plug-in estimate of I(mu). Diagnostic only: the estimator is
/// biased (binning loses information, so it tends to under-read).
///
/// With h = (max - min)/bins the grid spans [min - h, max + h] in `bins`
/// equal cells; each nonempty cell contributes p ln(p/q) where p is the
/// empirical cell mass and q the N(0,1) cell mass. A sample whose atoms all
/// coincide has no density and rates +infinity.
[[nodiscard]] inline RateValue rate_function_estimate(EmpiricalMeasure const& mu, std::size_t bins)
{
    if (bins < 2 || mu.size() < bins)
        throw std::invalid_argument("rate_function_estimate needs size >= bins >= 2");
    constexpr double inf = std::numeric_limits<double>::infinity();
    auto const v = mu.values();
    double const lo = v.front();
    double const hi = v.back();
    if (!(hi > lo))
        return {inf, RateMethod::histogram_estimate};
    double const pad = (hi - lo) / static_cast<double>(bins);
    double const left = lo - pad;
    double const width = (hi - lo + 2.0 * pad) / static_cast<double>(bins);
    std::vector<std::size_t> counts(bins, 0);
    for (double x : v)
    {
        auto cell = static_cast<std::size_t>((x - left) / width);
        counts[std::min(cell, bins - 1)] += 1;
    }
    double const m = static_cast<double>(v.size());
    CompensatedSum kl;
    for (std::size_t b = 0; b < bins; ++b)
    {
        if (counts[b] == 0)
            continue;
        double const p = static_cast<double>(counts[b]) / m;
        double const a = left + static_cast<double>(b) * width;
        double const q = normal_interval_probability(a, a + width);
        if (!(q > 0.0))
            return {inf, RateMethod::histogram_estimate};
        kl.add(p * std::log(p / q));
    }
    return {std::max(0.0, kl.value()), RateMethod::histogram_estimate};
}

} // namespace asclt

#endif
