#ifndef ASCLT_WEIGHTS_HPP
#define ASCLT_WEIGHTS_HPP

// Weight matrices U (and the optional companion V) that turn the inputs into
// the weighted sums S_{n,k} = sum_j u_{k,j} X_j and T_{n,k} = sum_j v_{k,j} X_j,
// together with the almost-orthogonality diagnostics
//
//   (i)   max |u_{k,j}|
//   (ii)  max |sum_j u_{k1,j} u_{k2,j} - delta_{k1,k2}|
//   (iii) max |sum_j u_{k1,j} v_{k2,j}|
//
// which a valid family must keep below C / log(1+r)^{1+delta} for all n.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "asclt/fft.hpp"
#include "asclt/numeric.hpp"
#include "asclt/sources.hpp"

namespace asclt
{

enum class WeightKind : std::uint8_t
{
    trig,
    haar_orthogonal,
    custom,
};

[[nodiscard]] inline std::string_view weight_kind_name(WeightKind k) noexcept
{
    switch (k)
    {
    case WeightKind::trig: return "trig";
    case WeightKind::haar_orthogonal: return "haar";
    case WeightKind::custom: return "custom";
    }
    return "?";
}

[[nodiscard]] inline WeightKind parse_weight_kind(std::string_view name)
{
    if (name == "trig")
        return WeightKind::trig;
    if (name == "haar")
        return WeightKind::haar_orthogonal;
    if (name == "custom")
        return WeightKind::custom;
    throw std::invalid_argument("unknown weight kind '" + std::string(name) + "' (expected trig, haar or custom)");
}

/// Largest r allowed for trigonometric weights of length n.
[[nodiscard]] constexpr std::size_t max_trig_rows(std::size_t n) noexcept
{
    return n >= 1 ? (n - 1) / 2 : 0;
}

/// cos(2 pi t/n) and sin(2 pi t/n) for t = 0 ... n-1.
class TrigTable
{
  public:
    explicit TrigTable(std::size_t n) : n_{n}, cos_(n), sin_(n)
    {
        for (std::size_t t = 0; t < n; ++t)
            std::tie(cos_[t], sin_[t]) = cos_sin_turn(t, n);
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] double cos_at(std::uint64_t t) const noexcept { return cos_[t % n_]; }
    [[nodiscard]] double sin_at(std::uint64_t t) const noexcept { return sin_[t % n_]; }
    [[nodiscard]] std::span<double const> cos_values() const noexcept { return cos_; }
    [[nodiscard]] std::span<double const> sin_values() const noexcept { return sin_; }

  private:
    std::size_t n_;
    std::vector<double> cos_;
    std::vector<double> sin_;
};

/// An r x n weight matrix U with optional r x n companion V.
///
/// Indices are zero-based: row k holds the weights of S_{n,k+1}, column j
/// multiplies X_{j+1}. Trigonometric pairs are stored implicitly through a
/// table, u_{k,j} = sqrt(2/n) cos(2 pi ((k+1)(j+1) mod n)/n); everything else
/// is dense row-major. Immutable after construction.
class WeightMatrixPair
{
  public:
    [[nodiscard]] static WeightMatrixPair trig(std::size_t n, std::size_t r)
    {
        if (n < 3)
            throw std::invalid_argument("trigonometric weights need n >= 3");
        if (r < 1 || r > max_trig_rows(n))
            throw std::invalid_argument("trigonometric weights need 1 <= r <= floor((n-1)/2) = "
                                        + std::to_string(max_trig_rows(n)) + ", got r = " + std::to_string(r));
        WeightMatrixPair w;
        w.kind_ = WeightKind::trig;
        w.rows_ = r;
        w.cols_ = n;
        w.scale_ = std::sqrt(2.0 / static_cast<double>(n));
        w.table_ = std::make_shared<TrigTable const>(n);
        return w;
    }

    [[nodiscard]] static WeightMatrixPair dense(WeightKind kind, std::size_t rows, std::size_t cols,
                                                std::vector<double> u, std::optional<std::vector<double>> v = {})
    {
        if (kind == WeightKind::trig)
            throw std::invalid_argument("use WeightMatrixPair::trig for trigonometric weights");
        if (rows < 1 || cols < 1)
            throw std::invalid_argument("weight matrix must have at least one row and one column");
        if (u.size() != rows * cols || (v && v->size() != rows * cols))
            throw std::invalid_argument("weight matrix storage does not match its dimensions");
        auto finite = [](std::vector<double> const& m) {
            return std::all_of(m.begin(), m.end(), [](double x) { return std::isfinite(x); });
        };
        if (!finite(u) || (v && !finite(*v)))
            throw std::invalid_argument("weight matrix entries must be finite");
        WeightMatrixPair w;
        w.kind_ = kind;
        w.rows_ = rows;
        w.cols_ = cols;
        w.u_ = std::move(u);
        if (v)
        {
            w.v_ = std::move(*v);
            w.has_v_ = true;
        }
        return w;
    }

    [[nodiscard]] WeightKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool has_v() const noexcept { return kind_ == WeightKind::trig || has_v_; }
    [[nodiscard]] TrigTable const* trig_table() const noexcept { return table_.get(); }

    [[nodiscard]] double u(std::size_t k, std::size_t j) const noexcept
    {
        if (table_)
            return scale_ * table_->cos_at(static_cast<std::uint64_t>(k + 1) * (j + 1));
        return u_[k * cols_ + j];
    }

    [[nodiscard]] double v(std::size_t k, std::size_t j) const noexcept
    {
        if (table_)
            return scale_ * table_->sin_at(static_cast<std::uint64_t>(k + 1) * (j + 1));
        return v_[k * cols_ + j];
    }

    void row_u(std::size_t k, std::span<double> out) const noexcept
    {
        for (std::size_t j = 0; j < cols_; ++j)
            out[j] = u(k, j);
    }

    void row_v(std::size_t k, std::span<double> out) const noexcept
    {
        for (std::size_t j = 0; j < cols_; ++j)
            out[j] = v(k, j);
    }

  private:
    WeightMatrixPair() = default;

    WeightKind kind_ = WeightKind::custom;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    double scale_ = 0.0;
    std::shared_ptr<TrigTable const> table_;
    std::vector<double> u_;
    std::vector<double> v_;
    bool has_v_ = false;
};

[[nodiscard]] inline WeightMatrixPair make_trig_pair(std::size_t n, std::size_t r)
{
    return WeightMatrixPair::trig(n, r);
}

/// Haar-distributed n x n orthogonal matrix.
///
/// Orthonormalizes an n x n matrix of N(0,1) entries (entry (i,j) is X_{i n + j + 1}
/// of `spec`) by Householder QR and flips column signs so that R has a
/// positive diagonal; the resulting Q is exactly Haar.
[[nodiscard]] inline WeightMatrixPair sample_haar_orthogonal(std::size_t n, SourceSpec const& spec)
{
    if (n < 1)
        throw std::invalid_argument("Haar matrix needs n >= 1");
    if (!spec.is_standard_normal())
        throw std::invalid_argument("Haar sampling needs a standard normal source");
    Eigen::MatrixXd g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = spec.sample(i * n + j + 1);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    auto const& packed = qr.matrixQR();
    for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(n); ++c)
    {
        double const diag = packed(c, c);
        if (!(std::isfinite(diag) && diag != 0.0))
            throw std::runtime_error("Haar sampling: Gaussian draw is numerically rank deficient");
        if (diag < 0.0)
            q.col(c) *= -1.0;
    }
    std::vector<double> u(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            u[i * n + j] = q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return WeightMatrixPair::dense(WeightKind::haar_orthogonal, n, n, std::move(u));
}

/// Raw left-hand sides of conditions (i)-(iii). No decision about C is made;
/// compare the numbers across a schedule of n.
struct ConditionReport
{
    std::size_t n = 0;
    std::size_t r = 0;
    double delta = 1.0;
    double eps_entry_u = 0.0;
    std::optional<double> eps_entry_v;
    double eps_orth_u = 0.0;
    std::optional<double> eps_orth_v;
    std::optional<double> eps_cross;
    double log_scale = 0.0; ///< (log(1+r))^{1+delta}
};

enum class GramMethod : std::uint8_t
{
    automatic, ///< structured for trig weights, direct otherwise
    direct,    ///< compensated O(r^2 n) dot products of the stored entries
};

namespace detail
{
/// Unscaled sums over j = 1..n against row d of the trig table, for every
/// frequency m in Z_n:
///   cc[m] = sum cos(d j) cos(m j),  ss[m] = sum sin(d j) sin(m j),
///   cs[m] = sum cos(d j) sin(m j),  sc[m] = sum sin(d j) cos(m j)
/// (angles in units of 2 pi/n).
struct TrigGramRow
{
    std::vector<double> cc, ss, cs, sc;
};

[[nodiscard]] inline TrigGramRow trig_gram_row_direct(TrigTable const& tab, std::uint64_t d)
{
    std::size_t const n = tab.size();
    TrigGramRow row{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    for (std::uint64_t m = 0; m < n; ++m)
    {
        CompensatedSum cc, ss, cs, sc;
        for (std::uint64_t j = 1; j <= n; ++j)
        {
            double const c1 = tab.cos_at(d * j), s1 = tab.sin_at(d * j);
            double const c2 = tab.cos_at(m * j), s2 = tab.sin_at(m * j);
            cc.add(c1 * c2);
            ss.add(s1 * s2);
            cs.add(c1 * s2);
            sc.add(s1 * c2);
        }
        row.cc[m] = cc.value();
        row.ss[m] = ss.value();
        row.cs[m] = cs.value();
        row.sc[m] = sc.value();
    }
    return row;
}

/// Same sums from one complex FFT of a_j = cos(d j) + i sin(d j).
/// With F(m) = sum_j a_j e^{-2 pi i j m/n}:
///   Re F(m) = cc + ss,  Re F(-m) = cc - ss,  Im F(m) = sc - cs,  Im F(-m) = sc + cs.
[[nodiscard]] inline TrigGramRow trig_gram_row_fft(TrigTable const& tab, FftPlan const& plan, std::uint64_t d)
{
    std::size_t const n = tab.size();
    std::vector<cplx> a(n);
    for (std::uint64_t j = 1; j <= n; ++j)
        a[j % n] = cplx(tab.cos_at(d * j), tab.sin_at(d * j));
    plan.forward(a);
    TrigGramRow row{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t m = 0; m < n; ++m)
    {
        cplx const f = a[m];
        cplx const g = a[(n - m) % n];
        row.cc[m] = 0.5 * (f.real() + g.real());
        row.ss[m] = 0.5 * (f.real() - g.real());
        row.sc[m] = 0.5 * (f.imag() + g.imag());
        row.cs[m] = 0.5 * (g.imag() - f.imag());
    }
    return row;
}

/// Rows are computed directly (compensated) up to this length, by FFT above it.
inline constexpr std::size_t trig_gram_direct_limit = 1024;

class TrigGramCache
{
  public:
    explicit TrigGramCache(TrigTable const& tab) : tab_{tab}
    {
        if (tab.size() > trig_gram_direct_limit)
            plan_.emplace(tab.size());
    }

    TrigGramRow const& row(std::uint64_t d)
    {
        auto it = rows_.find(d);
        if (it == rows_.end())
            it = rows_.emplace(d, plan_ ? trig_gram_row_fft(tab_, *plan_, d) : trig_gram_row_direct(tab_, d)).first;
        return it->second;
    }

  private:
    TrigTable const& tab_;
    std::optional<FftPlan> plan_;
    std::map<std::uint64_t, TrigGramRow> rows_;
};

/// Splits k (1 <= k < n) as k = d w mod n with d = gcd(k, n) and w a unit mod n.
/// Substituting j -> w^{-1} j maps sum_j f(k j) g(k2 j) onto sum_j f(d j) g(w^{-1} k2 j),
/// a pure reordering of the same terms.
struct UnitSplit
{
    std::uint64_t d;
    std::uint64_t w_inv;
};

[[nodiscard]] inline UnitSplit split_unit(std::uint64_t k, std::uint64_t n)
{
    std::uint64_t const d = gcd_u64(k, n);
    std::uint64_t const reduced = k / d;
    std::uint64_t const step = n / d;
    for (std::uint64_t w = reduced;; w += step)
        if (gcd_u64(w, n) == 1)
            return {d, inverse_mod(w % n, n)};
}

[[nodiscard]] inline ConditionReport check_trig_structured(WeightMatrixPair const& w)
{
    TrigTable const& tab = *w.trig_table();
    std::uint64_t const n = w.cols();
    std::uint64_t const r = w.rows();
    double const scale2 = 2.0 / static_cast<double>(n);
    ConditionReport rep;

    // (i): row k reaches exactly the residues that are multiples of gcd(k, n).
    std::map<std::uint64_t, bool> divisors;
    for (std::uint64_t k = 1; k <= r; ++k)
        divisors[gcd_u64(k, n)] = true;
    double max_c = 0.0, max_s = 0.0;
    for (auto const& [d, unused] : divisors)
        for (std::uint64_t t = 0; t < n; t += d)
        {
            max_c = std::max(max_c, std::abs(tab.cos_at(t)));
            max_s = std::max(max_s, std::abs(tab.sin_at(t)));
        }
    double const scale = std::sqrt(scale2);
    rep.eps_entry_u = scale * max_c;
    rep.eps_entry_v = scale * max_s;

    TrigGramCache cache(tab);
    double orth_u = 0.0, orth_v = 0.0, cross = 0.0;
    for (std::uint64_t k1 = 1; k1 <= r; ++k1)
    {
        auto const [d, w_inv] = split_unit(k1, n);
        auto const& row = cache.row(d);
        std::uint64_t m = 0;
        for (std::uint64_t k2 = 1; k2 <= r; ++k2)
        {
            m += w_inv;
            if (m >= n)
                m -= n;
            double const kron = k1 == k2 ? 1.0 : 0.0;
            orth_u = std::max(orth_u, std::abs(scale2 * row.cc[m] - kron));
            orth_v = std::max(orth_v, std::abs(scale2 * row.ss[m] - kron));
            cross = std::max(cross, std::abs(scale2 * row.cs[m]));
        }
    }
    rep.eps_orth_u = orth_u;
    rep.eps_orth_v = orth_v;
    rep.eps_cross = cross;
    return rep;
}

[[nodiscard]] inline ConditionReport check_direct(WeightMatrixPair const& w)
{
    std::size_t const r = w.rows();
    std::size_t const n = w.cols();
    bool const has_v = w.has_v();
    std::vector<double> u(r * n), v(has_v ? r * n : 0);
    for (std::size_t k = 0; k < r; ++k)
    {
        w.row_u(k, std::span(u).subspan(k * n, n));
        if (has_v)
            w.row_v(k, std::span(v).subspan(k * n, n));
    }
    auto row = [n](std::vector<double> const& m, std::size_t k) { return std::span<double const>(m).subspan(k * n, n); };
    auto max_abs = [](std::vector<double> const& m) {
        double best = 0.0;
        for (double x : m)
            best = std::max(best, std::abs(x));
        return best;
    };
    auto orth = [&](std::vector<double> const& m) {
        double worst = 0.0;
        for (std::size_t k1 = 0; k1 < r; ++k1)
            for (std::size_t k2 = k1; k2 < r; ++k2)
                worst = std::max(worst, std::abs(compensated_dot(row(m, k1), row(m, k2)) - (k1 == k2 ? 1.0 : 0.0)));
        return worst;
    };
    ConditionReport rep;
    rep.eps_entry_u = max_abs(u);
    rep.eps_orth_u = orth(u);
    if (has_v)
    {
        rep.eps_entry_v = max_abs(v);
        rep.eps_orth_v = orth(v);
        double cross = 0.0;
        for (std::size_t k1 = 0; k1 < r; ++k1)
            for (std::size_t k2 = 0; k2 < r; ++k2)
                cross = std::max(cross, std::abs(compensated_dot(row(u, k1), row(v, k2))));
        rep.eps_cross = cross;
    }
    return rep;
}
} // namespace detail

/// Measures how well `w` satisfies conditions (i)-(iii).
///
/// Trig weights are never materialized: each Gram entry is read off a
/// per-divisor row (see detail::split_unit), so the cost is O(r^2 + tau(n) n log n)
/// instead of O(r^2 n). GramMethod::direct forces plain compensated dot
/// products for every kind.
[[nodiscard]] inline ConditionReport check_conditions(WeightMatrixPair const& w, double delta,
                                                      GramMethod method = GramMethod::automatic)
{
    if (!(delta > 0.0))
        throw std::invalid_argument("delta must be positive");
    ConditionReport rep = (w.kind() == WeightKind::trig && method == GramMethod::automatic)
                              ? detail::check_trig_structured(w)
                              : detail::check_direct(w);
    rep.n = w.cols();
    rep.r = w.rows();
    rep.delta = delta;
    rep.log_scale = std::pow(std::log1p(static_cast<double>(w.rows())), 1.0 + delta);
    return rep;
}

struct TrigIdentityReport
{
    bool passed = false;
    double max_residual = 0.0;
    std::string worst_identity; ///< "cos*cos", "sin*sin", "cos*sin" or "sin*cos"
    std::uint64_t worst_k1 = 0;
    std::uint64_t worst_k2 = 0;
};

/// Expected value of sum_{j=1}^n cos(2 pi k1 j/n) cos(2 pi k2 j/n) (and the sin*sin sum).
///
/// Both vanish unless k1 = +-k2 mod n; then each coincidence contributes n/2
/// (with sign - for the k1 + k2 = n term of sin*sin).
[[nodiscard]] constexpr double trig_cc_expected(std::uint64_t k1, std::uint64_t k2, std::uint64_t n) noexcept
{
    double const half = 0.5 * static_cast<double>(n);
    return half * ((k1 % n == k2 % n ? 1.0 : 0.0) + ((k1 + k2) % n == 0 ? 1.0 : 0.0));
}

[[nodiscard]] constexpr double trig_ss_expected(std::uint64_t k1, std::uint64_t k2, std::uint64_t n) noexcept
{
    double const half = 0.5 * static_cast<double>(n);
    return half * ((k1 % n == k2 % n ? 1.0 : 0.0) - ((k1 + k2) % n == 0 ? 1.0 : 0.0));
}

/// Checks the product sums of cos/sin at frequencies k1, k2 against their exact
/// values for every pair 1 <= k1, k2 <= n, including the k1 + k2 = n and
/// 2k = n coincidences. Every pair reduces to (d, m) with d | n (see
/// detail::split_unit), so one row per divisor of n covers all n^2 pairs.
[[nodiscard]] inline TrigIdentityReport verify_trig_identities(std::size_t n, double tol)
{
    if (n < 3)
        throw std::invalid_argument("verify_trig_identities needs n >= 3");
    TrigTable const tab(n);
    detail::TrigGramCache cache(tab);
    TrigIdentityReport rep;
    auto consider = [&rep, n](double residual, char const* name, std::uint64_t d, std::uint64_t m) {
        if (residual > rep.max_residual || rep.worst_identity.empty())
        {
            rep.max_residual = residual;
            rep.worst_identity = name;
            rep.worst_k1 = d;
            rep.worst_k2 = m == 0 ? n : m;
        }
    };
    for (std::uint64_t d = 1; d <= n; ++d)
    {
        if (n % d != 0)
            continue;
        auto const& row = cache.row(d % n);
        for (std::uint64_t m = 0; m < n; ++m)
        {
            consider(std::abs(row.cc[m] - trig_cc_expected(d % n, m, n)), "cos*cos", d, m);
            consider(std::abs(row.ss[m] - trig_ss_expected(d % n, m, n)), "sin*sin", d, m);
            consider(std::abs(row.cs[m]), "cos*sin", d, m);
            consider(std::abs(row.sc[m]), "sin*cos", d, m);
        }
    }
    rep.passed = rep.max_residual <= tol;
    return rep;
}

/// Reads a dense matrix: one row per line, comma-separated decimal floats.
/// Blank lines and lines starting with '#' are skipped.
[[nodiscard]] inline std::vector<std::vector<double>> parse_matrix_csv(std::istream& in)
{
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#')
            continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
        {
            std::size_t used = 0;
            double value = 0.0;
            try
            {
                value = std::stod(cell, &used);
            }
            catch (std::exception const&)
            {
                used = 0;
            }
            if (used == 0 || cell.find_first_not_of(" \t", used) != std::string::npos || !std::isfinite(value))
                throw std::invalid_argument("matrix CSV line " + std::to_string(line_no) + ": bad number '" + cell + "'");
            row.push_back(value);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::invalid_argument("matrix CSV line " + std::to_string(line_no) + ": expected "
                                        + std::to_string(rows.front().size()) + " columns, got "
                                        + std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw std::invalid_argument("matrix CSV is empty");
    return rows;
}

[[nodiscard]] inline WeightMatrixPair custom_weights(std::vector<std::vector<double>> const& u,
                                                     std::optional<std::vector<std::vector<double>>> const& v = {})
{
    std::size_t const r = u.size();
    std::size_t const n = u.front().size();
    auto flatten = [&](std::vector<std::vector<double>> const& m) {
        if (m.size() != r || m.front().size() != n)
            throw std::invalid_argument("U and V must have the same shape");
        std::vector<double> flat;
        flat.reserve(r * n);
        for (auto const& row : m)
            flat.insert(flat.end(), row.begin(), row.end());
        return flat;
    };
    std::optional<std::vector<double>> vflat;
    if (v)
        vflat = flatten(*v);
    return WeightMatrixPair::dense(WeightKind::custom, r, n, flatten(u), std::move(vflat));
}

/// Writes U (or V) as CSV with 17 significant digits.
inline void write_matrix_csv(WeightMatrixPair const& w, std::ostream& out, bool companion = false)
{
    out.precision(17);
    for (std::size_t k = 0; k < w.rows(); ++k)
    {
        for (std::size_t j = 0; j < w.cols(); ++j)
        {
            if (j != 0)
                out << ',';
            out << (companion ? w.v(k, j) : w.u(k, j));
        }
        out << '\n';
    }
}

} // namespace asclt

#endif
