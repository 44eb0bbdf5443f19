#ifndef ASCLT_SOURCES_HPP
#define ASCLT_SOURCES_HPP

// Independent, standardized (mean 0, variance 1) random inputs X_1, X_2, ...
//
// Every X_j is a pure function of (master_seed, stream_id, j). One SourceSpec
// therefore names one infinite sample path, and the first n values do not
// depend on how far the path is ever read.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "asclt/philox.hpp"

namespace asclt
{

enum class Law : std::uint8_t
{
    rademacher,  ///< +-1 with probability 1/2
    uniform,     ///< uniform on [-sqrt(3), sqrt(3)]
    two_point,   ///< standardized Bernoulli(p)
    normal,      ///< N(0, 1)
    exponential, ///< Exp(1) - 1
    zero,        ///< X == 0; degenerate control input, not standardized
};

struct Component
{
    Law law = Law::rademacher;
    double p = 0.5; ///< only used by two_point
};

[[nodiscard]] inline std::string_view law_name(Law law) noexcept
{
    switch (law)
    {
    case Law::rademacher: return "rademacher";
    case Law::uniform: return "uniform";
    case Law::two_point: return "two_point";
    case Law::normal: return "normal";
    case Law::exponential: return "exponential";
    case Law::zero: return "zero";
    }
    return "?";
}

[[nodiscard]] inline Law parse_law(std::string_view name)
{
    for (Law law : {Law::rademacher, Law::uniform, Law::two_point, Law::normal, Law::exponential, Law::zero})
        if (name == law_name(law))
            return law;
    throw std::invalid_argument("unknown family '" + std::string(name) + "'");
}

inline void validate(Component const& c)
{
    if (c.law == Law::two_point && !(c.p > 0.0 && c.p < 1.0))
        throw std::invalid_argument("two_point family requires 0 < p < 1");
}

namespace detail
{
inline constexpr double sqrt3 = 1.7320508075688772;

[[nodiscard]] inline std::uint64_t law_tag(Law law) noexcept
{
    return 0x61736c7400000000ull | static_cast<std::uint64_t>(law);
}
} // namespace detail

/// X_j for a single component law.
[[nodiscard]] inline double sample_component(Component const& c, std::uint64_t seed, std::uint64_t stream,
                                             std::uint64_t j) noexcept
{
    if (c.law == Law::zero)
        return 0.0;
    RandomBlock const b = random_block(seed, detail::law_tag(c.law), stream, j);
    switch (c.law)
    {
    case Law::rademacher: return (b.hi >> 63) != 0 ? 1.0 : -1.0;
    case Law::uniform: return detail::sqrt3 * (2.0 * to_unit(b.hi) - 1.0);
    case Law::two_point:
        return to_unit(b.hi) < c.p ? std::sqrt((1.0 - c.p) / c.p) : -std::sqrt(c.p / (1.0 - c.p));
    case Law::normal:
    {
        // Box-Muller, cosine branch only.
        double const radius = std::sqrt(-2.0 * std::log(to_unit_open_closed(b.hi)));
        return radius * std::cos(2.0 * std::numbers::pi * to_unit(b.lo));
    }
    case Law::exponential: return -std::log(to_unit_open_closed(b.hi)) - 1.0;
    case Law::zero: break;
    }
    return 0.0;
}

class SourceSpec
{
  public:
    SourceSpec() = default;

    explicit SourceSpec(Component c, std::uint64_t master_seed = 0, std::uint64_t stream_id = 0)
        : cycle_{c}, seed_{master_seed}, stream_{stream_id}
    {
        validate(c);
    }

    /// Non-identically distributed inputs: X_j follows components[(j-1) % size].
    static SourceSpec heterogeneous(std::vector<Component> components, std::uint64_t master_seed = 0,
                                    std::uint64_t stream_id = 0)
    {
        if (components.empty())
            throw std::invalid_argument("heterogeneous family needs at least one component");
        for (auto const& c : components)
        {
            validate(c);
            if (c.law == Law::zero)
                throw std::invalid_argument("zero law is not allowed inside a heterogeneous family");
        }
        SourceSpec s;
        s.cycle_ = std::move(components);
        s.heterogeneous_ = true;
        s.seed_ = master_seed;
        s.stream_ = stream_id;
        return s;
    }

    [[nodiscard]] bool is_heterogeneous() const noexcept { return heterogeneous_; }
    [[nodiscard]] std::span<Component const> components() const noexcept { return cycle_; }
    [[nodiscard]] std::uint64_t master_seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_; }

    /// True when every X_j is N(0,1).
    [[nodiscard]] bool is_standard_normal() const noexcept
    {
        return std::all_of(cycle_.begin(), cycle_.end(), [](Component const& c) { return c.law == Law::normal; });
    }

    [[nodiscard]] SourceSpec with_stream(std::uint64_t stream_id) const
    {
        SourceSpec s = *this;
        s.stream_ = stream_id;
        return s;
    }

    [[nodiscard]] SourceSpec with_seed(std::uint64_t master_seed) const
    {
        SourceSpec s = *this;
        s.seed_ = master_seed;
        return s;
    }

    /// X_j, j >= 1.
    [[nodiscard]] double sample(std::uint64_t j) const
    {
        if (j == 0)
            throw std::invalid_argument("sample index j must be >= 1");
        return sample_component(component_for(j), seed_, stream_, j);
    }

    /// out[i] = X_{first + i}.
    void fill(std::span<double> out, std::uint64_t first = 1) const
    {
        if (first == 0)
            throw std::invalid_argument("sample index j must be >= 1");
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = sample_component(component_for(first + i), seed_, stream_, first + i);
    }

    /// X_1 ... X_n.
    [[nodiscard]] std::vector<double> draw(std::size_t n) const
    {
        std::vector<double> x(n);
        fill(x);
        return x;
    }

    /// Family keyword as used by the config grammar.
    [[nodiscard]] std::string family_name() const
    {
        return heterogeneous_ ? "heterogeneous" : std::string(law_name(cycle_.front().law));
    }

    /// The `params` value of the config grammar ("" when there are none).
    [[nodiscard]] std::string params() const
    {
        std::ostringstream os;
        os.precision(17);
        if (heterogeneous_)
        {
            for (std::size_t i = 0; i < cycle_.size(); ++i)
            {
                if (i != 0)
                    os << ',';
                os << law_name(cycle_[i].law);
                if (cycle_[i].law == Law::two_point)
                    os << ':' << cycle_[i].p;
            }
        }
        else if (cycle_.front().law == Law::two_point)
        {
            os << cycle_.front().p;
        }
        return os.str();
    }

  private:
    [[nodiscard]] Component const& component_for(std::uint64_t j) const noexcept
    {
        return cycle_.size() == 1 ? cycle_.front() : cycle_[(j - 1) % cycle_.size()];
    }

    std::vector<Component> cycle_{Component{}};
    bool heterogeneous_ = false;
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
};

/// Builds a SourceSpec from the config grammar:
///   family = rademacher | uniform | two_point | normal | exponential | zero | heterogeneous
///   params = <p>                        (two_point)
///   params = law[:p],law[:p],...        (heterogeneous)
[[nodiscard]] inline SourceSpec parse_source(std::string_view family, std::string_view params,
                                             std::uint64_t master_seed, std::uint64_t stream_id)
{
    auto parse_p = [](std::string_view text) {
        std::string const s(text);
        std::size_t used = 0;
        double p = 0.0;
        try
        {
            p = std::stod(s, &used);
        }
        catch (std::exception const&)
        {
            throw std::invalid_argument("invalid two_point parameter '" + s + "'");
        }
        if (used != s.size())
            throw std::invalid_argument("invalid two_point parameter '" + s + "'");
        return p;
    };
    if (family == "heterogeneous")
    {
        std::vector<Component> parts;
        std::size_t pos = 0;
        while (pos <= params.size())
        {
            std::size_t const comma = std::min(params.find(',', pos), params.size());
            std::string_view item = params.substr(pos, comma - pos);
            Component c;
            std::size_t const colon = item.find(':');
            c.law = parse_law(item.substr(0, colon));
            if (colon != std::string_view::npos)
            {
                if (c.law != Law::two_point)
                    throw std::invalid_argument("only two_point takes a parameter");
                c.p = parse_p(item.substr(colon + 1));
            }
            parts.push_back(c);
            pos = comma + 1;
        }
        return SourceSpec::heterogeneous(std::move(parts), master_seed, stream_id);
    }
    Component c{parse_law(family), 0.5};
    if (c.law == Law::two_point)
    {
        if (!params.empty())
            c.p = parse_p(params);
    }
    else if (!params.empty())
    {
        throw std::invalid_argument("family '" + std::string(family) + "' takes no params");
    }
    return SourceSpec(c, master_seed, stream_id);
}

struct MomentReport
{
    double mean = 0.0;
    double variance = 1.0;
    double third_abs_moment = 0.0;
    /// Smallest tau with E(|X|^3 exp(|X|/tau)) <= tau, if one exists in the search range.
    std::optional<double> exp_moment_tau;
};

inline constexpr double tau_search_lo = 1e-3;
inline constexpr double tau_search_hi = 1e3;

namespace detail
{
/// Two-point law: value a with probability p, value b with probability 1-p.
[[nodiscard]] inline std::pair<double, double> two_point_atoms(double p) noexcept
{
    return {std::sqrt((1.0 - p) / p), -std::sqrt(p / (1.0 - p))};
}

/// E(|X|^3 exp(|X|/tau)); +inf when the expectation diverges or overflows.
[[nodiscard]] inline double exp_weighted_third_moment(Component const& c, double tau)
{
    using boost::math::quadrature::gauss_kronrod;
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (c.law)
    {
    case Law::zero: return 0.0;
    case Law::rademacher: return std::exp(1.0 / tau);
    case Law::two_point:
    {
        auto const [a, b] = two_point_atoms(c.p);
        return c.p * a * a * a * std::exp(a / tau) + (1.0 - c.p) * std::abs(b * b * b) * std::exp(-b / tau);
    }
    case Law::uniform:
    {
        // Density 1/(2 sqrt 3) on [-sqrt 3, sqrt 3]; symmetric.
        auto f = [tau](double x) { return x * x * x * std::exp(x / tau); };
        return gauss_kronrod<double, 31>::integrate(f, 0.0, sqrt3, 10, 1e-13) / sqrt3;
    }
    case Law::normal:
    {
        // exp(1/(2 tau^2)) alone dwarfs tau long before this cutoff.
        if (tau < 0.05)
            return inf;
        auto f = [tau](double x) {
            return x * x * x * std::exp(x / tau - 0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        };
        double const peak = 1.0 / tau + 10.0;
        return 2.0 * (gauss_kronrod<double, 61>::integrate(f, 0.0, peak, 15, 1e-13)
                      + gauss_kronrod<double, 61>::integrate(f, peak, inf, 15, 1e-13));
    }
    case Law::exponential:
    {
        // X = Y - 1, Y ~ Exp(1). The right tail is e^{-1} * 6 / (1 - 1/tau)^4.
        if (tau <= 1.0)
            return inf;
        double const rate = 1.0 - 1.0 / tau;
        double const right = 6.0 * std::exp(-1.0) / (rate * rate * rate * rate);
        auto f = [tau](double y) {
            double const w = 1.0 - y;
            return w * w * w * std::exp(w / tau - y);
        };
        return right + gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 10, 1e-13);
    }
    }
    return inf;
}

[[nodiscard]] inline double third_abs_moment(Component const& c)
{
    switch (c.law)
    {
    case Law::rademacher: return 1.0;
    case Law::uniform: return 3.0 * sqrt3 / 4.0;
    case Law::two_point: return ((1.0 - c.p) * (1.0 - c.p) + c.p * c.p) / std::sqrt(c.p * (1.0 - c.p));
    case Law::normal: return 2.0 * std::sqrt(2.0 / std::numbers::pi);
    case Law::exponential: return 12.0 / std::numbers::e - 2.0;
    case Law::zero: return 0.0;
    }
    return 0.0;
}

/// Bisection for the smallest tau in [lo, hi] with E(|X|^3 e^{|X|/tau}) <= tau.
/// The left side decreases in tau and the right side increases, so the
/// feasible set is an interval [tau*, inf).
[[nodiscard]] inline std::optional<double> exp_moment_tau(Component const& c)
{
    if (c.law == Law::rademacher)
    {
        // e^{1/tau} = tau  <=>  tau = 1/W(1), W(1) the omega constant.
        double w = 0.5;
        for (int i = 0; i < 64; ++i)
            w -= (w * std::exp(w) - 1.0) / (std::exp(w) * (w + 1.0));
        return 1.0 / w;
    }
    auto feasible = [&c](double tau) { return exp_weighted_third_moment(c, tau) <= tau; };
    double lo = tau_search_lo;
    double hi = tau_search_hi;
    if (!feasible(hi))
        return std::nullopt;
    if (feasible(lo))
        return lo;
    for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i)
    {
        double const mid = 0.5 * (lo + hi);
        (feasible(mid) ? hi : lo) = mid;
    }
    return hi;
}
} // namespace detail

/// Closed-form moments of the family; tau from the bisection search above.
[[nodiscard]] inline MomentReport moment_report(SourceSpec const& spec)
{
    MomentReport rep;
    auto const comps = spec.components();
    bool const degenerate = comps.size() == 1 && comps.front().law == Law::zero;
    rep.mean = 0.0;
    rep.variance = degenerate ? 0.0 : 1.0;
    rep.third_abs_moment = 0.0;
    rep.exp_moment_tau = 0.0;
    for (auto const& c : comps)
    {
        rep.third_abs_moment = std::max(rep.third_abs_moment, detail::third_abs_moment(c));
        auto const tau = detail::exp_moment_tau(c);
        if (!tau || !rep.exp_moment_tau)
            rep.exp_moment_tau.reset();
        else
            rep.exp_moment_tau = std::max(*rep.exp_moment_tau, *tau);
    }
    return rep;
}

} // namespace asclt

#endif
