#ifndef ASCLT_IO_HPP
#define ASCLT_IO_HPP

// JSON and CSV artifacts. Every floating-point value is written with 17
// significant digits so that it reads back to the same double; non-finite
// values become JSON null. The "timestamp" object is always the last member
// so that runs can be compared byte for byte with it removed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "asclt/experiments.hpp"
#include "asclt/spectra.hpp"
#include "asclt/weights.hpp"

namespace asclt
{

using ordered_json = nlohmann::ordered_json;

inline constexpr char const* result_schema_version = "1.0.0";

/// "%.17g", or "null" for NaN and infinities.
[[nodiscard]] inline std::string format_double(double v)
{
    if (!std::isfinite(v))
        return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail
{
inline void write_json(ordered_json const& j, std::ostream& out, int indent, int depth)
{
    auto newline = [&](int d) {
        out << '\n';
        for (int i = 0; i < d * indent; ++i)
            out << ' ';
    };
    switch (j.type())
    {
    case ordered_json::value_t::object:
    {
        if (j.empty())
        {
            out << "{}";
            return;
        }
        out << '{';
        bool first = true;
        for (auto const& [key, value] : j.items())
        {
            if (!first)
                out << ',';
            first = false;
            newline(depth + 1);
            out << ordered_json(key).dump() << ": ";
            write_json(value, out, indent, depth + 1);
        }
        newline(depth);
        out << '}';
        return;
    }
    case ordered_json::value_t::array:
    {
        if (j.empty())
        {
            out << "[]";
            return;
        }
        out << '[';
        bool first = true;
        for (auto const& value : j)
        {
            if (!first)
                out << ',';
            first = false;
            newline(depth + 1);
            write_json(value, out, indent, depth + 1);
        }
        newline(depth);
        out << ']';
        return;
    }
    case ordered_json::value_t::number_float: out << format_double(j.get<double>()); return;
    default: out << j.dump(); return;
    }
}

[[nodiscard]] inline ordered_json optional_bool(std::optional<bool> v)
{
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

[[nodiscard]] inline ordered_json number(double v)
{
    return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}
} // namespace detail

inline void dump_json(ordered_json const& j, std::ostream& out)
{
    detail::write_json(j, out, 2, 0);
    out << '\n';
}

[[nodiscard]] inline std::string dump_json(ordered_json const& j)
{
    std::ostringstream out;
    dump_json(j, out);
    return out.str();
}

/// UTC time as ISO 8601 ("2026-01-02T03:04:05Z") or compact ("20260102T030405Z").
[[nodiscard]] inline std::string utc_timestamp(bool compact)
{
    std::time_t const now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, compact ? "%Y%m%dT%H%M%SZ" : "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

[[nodiscard]] inline ordered_json to_json(SourceSpec const& spec)
{
    ordered_json j;
    j["family"] = spec.family_name();
    j["params"] = spec.params();
    j["master_seed"] = spec.master_seed();
    j["stream_id"] = spec.stream_id();
    return j;
}

[[nodiscard]] inline ordered_json to_json(GrowthDiagnostics const& g)
{
    ordered_json rows = ordered_json::array();
    for (auto const& r : g.rows)
    {
        ordered_json row;
        row["n"] = r.n;
        row["r"] = r.r;
        row["r3_log2n_over_n"] = detail::number(r.r3_log2n_over_n);
        row["r4_over_n"] = detail::number(r.r4_over_n);
        row["logn_over_r"] = detail::number(r.logn_over_r);
        rows.push_back(std::move(row));
    }
    ordered_json j;
    j["rows"] = std::move(rows);
    j["r3_log2n_over_n_decreasing"] = detail::optional_bool(g.r3_log2n_over_n_decreasing);
    j["r4_over_n_decreasing"] = detail::optional_bool(g.r4_over_n_decreasing);
    j["logn_over_r_decreasing"] = detail::optional_bool(g.logn_over_r_decreasing);
    return j;
}

[[nodiscard]] inline ordered_json to_json(Spectrum const& sp)
{
    ordered_json j;
    j["n"] = sp.n;
    j["ensemble"] = std::string(ensemble_name(sp.ensemble));
    j["normalization"] = detail::number(sp.normalization);
    j["typical_count"] = sp.typical.size();
    ordered_json ex = ordered_json::array();
    for (double v : sp.exceptional)
        ex.push_back(detail::number(v));
    j["exceptional"] = std::move(ex);
    j["max_imag_residual"] = detail::number(sp.max_imag_residual);
    return j;
}

/// Full result; `timestamp` is the wall-clock metadata and is emitted last.
[[nodiscard]] inline ordered_json to_json(ExperimentResult const& res, std::string const& timestamp)
{
    ordered_json j;
    j["schema_version"] = result_schema_version;
    j["experiment"] = res.experiment;
    j["source"] = to_json(res.source);
    j["weights"] = res.weights ? ordered_json(std::string(weight_kind_name(*res.weights))) : ordered_json(nullptr);
    ordered_json schedule = ordered_json::array();
    for (auto const& p : res.schedule.points())
        schedule.push_back({{"n", p.n}, {"r", p.r}});
    j["schedule"] = std::move(schedule);
    j["growth"] = to_json(res.growth);
    j["replicas"] = res.replicas;
    j["replica_streams"] = "stream_id = replica index";
    ordered_json params = ordered_json::object();
    for (auto const& [k, v] : res.parameters)
        params[k] = detail::number(v);
    j["parameters"] = std::move(params);
    ordered_json points = ordered_json::array();
    for (auto const& p : res.points)
    {
        ordered_json pj;
        pj["n"] = p.n;
        pj["r"] = p.r;
        ordered_json stats = ordered_json::object();
        for (auto const& [k, v] : p.values)
            stats[k] = detail::number(v);
        ordered_json flags = ordered_json::object();
        for (auto const& [k, v] : p.flags)
            flags[k] = v;
        ordered_json labels = ordered_json::object();
        for (auto const& [k, v] : p.labels)
            labels[k] = v;
        pj["stats"] = std::move(stats);
        pj["flags"] = std::move(flags);
        pj["labels"] = std::move(labels);
        points.push_back(std::move(pj));
    }
    j["points"] = std::move(points);
    if (res.spectrum)
        j["spectrum"] = to_json(*res.spectrum);
    j["timestamp"] = {{"utc", timestamp}, {"wall_clock_seconds", detail::number(res.wall_clock_seconds)}};
    return j;
}

[[nodiscard]] inline ordered_json to_json(ConditionReport const& rep)
{
    auto opt = [](std::optional<double> v) { return v ? detail::number(*v) : ordered_json(nullptr); };
    ordered_json j;
    j["n"] = rep.n;
    j["r"] = rep.r;
    j["delta"] = detail::number(rep.delta);
    j["eps_entry_u"] = detail::number(rep.eps_entry_u);
    j["eps_entry_v"] = opt(rep.eps_entry_v);
    j["eps_orth_u"] = detail::number(rep.eps_orth_u);
    j["eps_orth_v"] = opt(rep.eps_orth_v);
    j["eps_cross"] = opt(rep.eps_cross);
    j["log_scale"] = detail::number(rep.log_scale);
    return j;
}

/// One row per schedule point: n, r, then every statistic and flag (0/1).
inline void write_points_csv(ExperimentResult const& res, std::ostream& out)
{
    out << "n,r";
    if (!res.points.empty())
    {
        for (auto const& [k, v] : res.points.front().values)
            out << ',' << k;
        for (auto const& [k, v] : res.points.front().flags)
            out << ',' << k;
    }
    out << '\n';
    for (auto const& p : res.points)
    {
        out << p.n << ',' << p.r;
        for (auto const& [k, v] : p.values)
            out << ',' << (std::isfinite(v) ? format_double(v) : std::string("nan"));
        for (auto const& [k, v] : p.flags)
            out << ',' << (v ? 1 : 0);
        out << '\n';
    }
}

inline void write_replicas_csv(ReplicaTable const& table, std::ostream& out)
{
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << (c ? "," : "") << table.columns[c];
    out << '\n';
    for (auto const& row : table.rows)
    {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? "," : "") << format_double(row[c]);
        out << '\n';
    }
}

/// index,eigenvalue,exceptional for real ensembles; index,real,imag for the
/// raw circulant (in DFT index order).
inline void write_spectrum_csv(Spectrum const& sp, std::ostream& out)
{
    if (!sp.complex_values.empty())
    {
        out << "index,real,imag\n";
        for (std::size_t k = 0; k < sp.complex_values.size(); ++k)
            out << k << ',' << format_double(sp.complex_values[k].real()) << ','
                << format_double(sp.complex_values[k].imag()) << '\n';
        return;
    }
    out << "index,eigenvalue,exceptional\n";
    std::vector<double> pending = sp.exceptional;
    for (std::size_t i = 0; i < sp.eigenvalues.size(); ++i)
    {
        double const v = sp.eigenvalues[i];
        auto it = std::find(pending.begin(), pending.end(), v);
        bool const exceptional = it != pending.end();
        if (exceptional)
            pending.erase(it);
        out << i << ',' << format_double(v) << ',' << (exceptional ? 1 : 0) << '\n';
    }
}

} // namespace asclt

#endif
