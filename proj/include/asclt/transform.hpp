#ifndef ASCLT_TRANSFORM_HPP
#define ASCLT_TRANSFORM_HPP

// Weighted partial sums S_{n,k} = sum_j u_{k,j} X_j and T_{n,k} = sum_j v_{k,j} X_j.
//
// The naive path is a compensated O(r n) loop and works for every weight kind;
// it is the reference the fast path is tested against. For trig weights the
// fast path reads all (S_{n,k}, T_{n,k}) off one real DFT of X in O(n log n).

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "asclt/fft.hpp"
#include "asclt/numeric.hpp"
#include "asclt/sources.hpp"
#include "asclt/weights.hpp"

namespace asclt
{

struct Provenance
{
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
    WeightKind kind = WeightKind::custom;
};

struct PartialSums
{
    std::size_t n = 0;
    std::size_t r = 0;
    std::vector<double> s;
    std::optional<std::vector<double>> t;
    std::optional<Provenance> provenance;
};

enum class SumPath : std::uint8_t
{
    automatic, ///< fast for trig weights with n >= fast_path_min_n, naive otherwise
    naive,
    fast,
};

inline constexpr std::size_t fast_path_min_n = 1024;

[[nodiscard]] inline PartialSums partial_sums_naive(WeightMatrixPair const& w, std::span<double const> x)
{
    if (x.size() != w.cols())
        throw std::invalid_argument("input length " + std::to_string(x.size()) + " does not match n = "
                                    + std::to_string(w.cols()));
    PartialSums out;
    out.n = w.cols();
    out.r = w.rows();
    out.s.resize(out.r);
    if (w.has_v())
        out.t.emplace(out.r);
    for (std::size_t k = 0; k < out.r; ++k)
    {
        CompensatedSum s, t;
        for (std::size_t j = 0; j < out.n; ++j)
            s.add(w.u(k, j) * x[j]);
        out.s[k] = s.value();
        if (out.t)
        {
            for (std::size_t j = 0; j < out.n; ++j)
                t.add(w.v(k, j) * x[j]);
            (*out.t)[k] = t.value();
        }
    }
    return out;
}

/// Reusable fast path for trig weights of a fixed (n, r).
///
/// With Y_k = sum_{j=1}^n X_j e^{-2 pi i j k/n}:
///   S_{n,k} = sqrt(2/n) Re Y_k,   T_{n,k} = -sqrt(2/n) Im Y_k.
class TrigTransform
{
  public:
    TrigTransform(std::size_t n, std::size_t r) : n_{n}, r_{r}, dft_{n}
    {
        if (n < 3 || r < 1 || r > max_trig_rows(n))
            throw std::invalid_argument("trig transform needs n >= 3 and 1 <= r <= floor((n-1)/2)");
    }

    [[nodiscard]] std::size_t n() const noexcept { return n_; }
    [[nodiscard]] std::size_t r() const noexcept { return r_; }

    [[nodiscard]] PartialSums operator()(std::span<double const> x) const
    {
        if (x.size() != n_)
            throw std::invalid_argument("input length " + std::to_string(x.size()) + " does not match n = "
                                        + std::to_string(n_));
        // X_j sits at position j mod n.
        std::vector<double> shifted(n_);
        shifted[0] = x[n_ - 1];
        std::copy(x.begin(), x.end() - 1, shifted.begin() + 1);
        auto const y = dft_.forward(shifted);
        double const scale = std::sqrt(2.0 / static_cast<double>(n_));
        PartialSums out;
        out.n = n_;
        out.r = r_;
        out.s.resize(r_);
        out.t.emplace(r_);
        for (std::size_t k = 1; k <= r_; ++k)
        {
            out.s[k - 1] = scale * y[k].real();
            (*out.t)[k - 1] = -scale * y[k].imag();
        }
        return out;
    }

  private:
    std::size_t n_;
    std::size_t r_;
    RealDft dft_;
};

[[nodiscard]] inline PartialSums partial_sums_fast(std::size_t n, std::size_t r, std::span<double const> x)
{
    return TrigTransform(n, r)(x);
}

[[nodiscard]] inline PartialSums partial_sums(WeightMatrixPair const& w, std::span<double const> x,
                                              SumPath path = SumPath::automatic)
{
    bool const trig = w.kind() == WeightKind::trig;
    if (path == SumPath::fast && !trig)
        throw std::invalid_argument("the fast path is only available for trig weights");
    bool const fast = path == SumPath::fast || (path == SumPath::automatic && trig && w.cols() >= fast_path_min_n);
    PartialSums out = fast ? partial_sums_fast(w.cols(), w.rows(), x) : partial_sums_naive(w, x);
    out.provenance = Provenance{0, 0, w.kind()};
    return out;
}

/// Partial sums of X_1..X_n drawn from `spec`, with provenance filled in.
[[nodiscard]] inline PartialSums partial_sums(WeightMatrixPair const& w, SourceSpec const& spec,
                                              SumPath path = SumPath::automatic)
{
    auto const x = spec.draw(w.cols());
    PartialSums out = partial_sums(w, x, path);
    out.provenance = Provenance{spec.master_seed(), spec.stream_id(), w.kind()};
    return out;
}

/// Trig-weighted sums of i.i.d. N(0,1) inputs. By the orthogonality of the
/// trig rows (r <= floor((n-1)/2)) the 2r outputs are themselves exactly
/// i.i.d. N(0,1).
[[nodiscard]] inline PartialSums gaussian_oracle_sums(std::size_t n, std::size_t r, SourceSpec const& spec)
{
    if (!spec.is_standard_normal())
        throw std::invalid_argument("gaussian_oracle_sums needs a standard normal source");
    auto const x = spec.draw(n);
    PartialSums out = partial_sums_fast(n, r, x);
    out.provenance = Provenance{spec.master_seed(), spec.stream_id(), WeightKind::trig};
    return out;
}

} // namespace asclt

#endif
