#ifndef ASCLT_CONFIG_HPP
#define ASCLT_CONFIG_HPP

// Run configuration: plain `key = value` files (one assignment per line,
// `#` starts a comment) overlaid by command-line flags. Every error names the
// line, or the flag, it comes from.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "asclt/experiments.hpp"
#include "asclt/sources.hpp"
#include "asclt/spectra.hpp"
#include "asclt/transform.hpp"
#include "asclt/weights.hpp"

namespace asclt
{

class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

enum class Experiment : std::uint8_t
{
    check_weights,
    asclt,
    bivariate,
    char_decay,
    clt_fluct,
    ldp,
    periodogram,
    spectrum,
    gen_weights,
};

[[nodiscard]] inline std::string_view experiment_name(Experiment e) noexcept
{
    switch (e)
    {
    case Experiment::check_weights: return "check-weights";
    case Experiment::asclt: return "asclt";
    case Experiment::bivariate: return "bivariate";
    case Experiment::char_decay: return "char-decay";
    case Experiment::clt_fluct: return "clt-fluct";
    case Experiment::ldp: return "ldp";
    case Experiment::periodogram: return "periodogram";
    case Experiment::spectrum: return "spectrum";
    case Experiment::gen_weights: return "gen-weights";
    }
    return "?";
}

inline constexpr Experiment all_experiments[] = {
    Experiment::check_weights, Experiment::asclt,       Experiment::bivariate,
    Experiment::char_decay,    Experiment::clt_fluct,   Experiment::ldp,
    Experiment::periodogram,   Experiment::spectrum,    Experiment::gen_weights,
};

/// Keys accepted by each experiment; everything else is rejected.
[[nodiscard]] inline std::vector<std::string_view> config_keys(Experiment e)
{
    std::vector<std::string_view> keys{"family", "params", "master_seed", "stream_id", "output_dir", "threads"};
    auto add = [&](std::initializer_list<std::string_view> more) { keys.insert(keys.end(), more); };
    switch (e)
    {
    case Experiment::check_weights: add({"weights", "n", "r", "delta", "gram", "u_csv", "v_csv"}); break;
    case Experiment::asclt: add({"weights", "schedule", "sum_path", "dump_sums"}); break;
    case Experiment::bivariate: add({"schedule", "sum_path", "dump_sums"}); break;
    case Experiment::char_decay: add({"schedule", "s", "t", "replicas"}); break;
    case Experiment::clt_fluct: add({"n", "r", "x", "replicas"}); break;
    case Experiment::ldp: add({"n", "r", "a", "replicas"}); break;
    case Experiment::periodogram: add({"sizes"}); break;
    case Experiment::spectrum: add({"ensemble", "n", "mean", "sigma"}); break;
    case Experiment::gen_weights: add({"weights", "n", "r"}); break;
    }
    return keys;
}

struct ConfigEntry
{
    std::string value;
    std::string origin; ///< "file:line" or "--flag"
};

/// Key/value pairs before interpretation.
struct RawConfig
{
    std::map<std::string, ConfigEntry, std::less<>> entries;

    [[nodiscard]] ConfigEntry const* find(std::string_view key) const
    {
        auto it = entries.find(key);
        return it == entries.end() ? nullptr : &it->second;
    }
};

namespace detail
{
[[nodiscard]] inline std::string_view trim(std::string_view s) noexcept
{
    auto const first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    auto const last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[nodiscard]] inline bool is_known_key(std::string_view key)
{
    for (Experiment e : all_experiments)
    {
        auto const keys = config_keys(e);
        if (std::find(keys.begin(), keys.end(), key) != keys.end())
            return true;
    }
    return false;
}
} // namespace detail

/// Parses `key = value` lines. `name` prefixes error locations.
[[nodiscard]] inline RawConfig parse_config(std::istream& in, std::string const& name)
{
    RawConfig cfg;
    std::map<std::string, std::size_t, std::less<>> first_line;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line))
    {
        ++number;
        std::string_view body = line;
        if (auto const hash = body.find('#'); hash != std::string_view::npos)
            body = body.substr(0, hash);
        body = detail::trim(body);
        if (body.empty())
            continue;
        std::string const where = name + ":" + std::to_string(number);
        auto const eq = body.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(where + ": expected 'key = value', got '" + std::string(body) + "'");
        std::string const key(detail::trim(body.substr(0, eq)));
        std::string const value(detail::trim(body.substr(eq + 1)));
        if (key.empty())
            throw ConfigError(where + ": missing key before '='");
        if (!detail::is_known_key(key))
            throw ConfigError(where + ": unknown key '" + key + "'");
        if (auto it = first_line.find(key); it != first_line.end())
            throw ConfigError(name + ": duplicate key '" + key + "' on lines " + std::to_string(it->second) + " and "
                              + std::to_string(number));
        first_line.emplace(key, number);
        cfg.entries.emplace(key, ConfigEntry{value, where});
    }
    return cfg;
}

[[nodiscard]] inline RawConfig load_raw_config(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file " + path.string());
    return parse_config(in, path.string());
}

/// Command-line values win over file values.
inline void apply_overrides(RawConfig& cfg, std::vector<std::pair<std::string, std::string>> const& flags)
{
    for (auto const& [key, value] : flags)
        cfg.entries[key] = ConfigEntry{value, "--" + key};
}

struct RunConfig
{
    Experiment experiment = Experiment::asclt;
    SourceSpec source;
    WeightKind weights = WeightKind::trig;
    std::optional<Schedule> schedule;
    std::size_t n = 0;
    std::size_t r = 0;
    double x = 0.0;
    double s = 1.0;
    double t = 0.0;
    double a = 0.5;
    double delta = 1.0;
    double mean = 0.0;
    double sigma = 1.0;
    GramMethod gram = GramMethod::automatic;
    SumPath sum_path = SumPath::automatic;
    std::size_t replicas = 0;
    std::vector<std::size_t> sizes;
    Ensemble ensemble = Ensemble::symmetric_circulant;
    std::string output_dir = ".";
    std::size_t threads = 0;
    bool dump_sums = false;
    std::string u_csv;
    std::string v_csv;
};

[[nodiscard]] inline std::size_t default_replicas(Experiment e) noexcept
{
    switch (e)
    {
    case Experiment::char_decay: return 500;
    case Experiment::clt_fluct: return 2000;
    case Experiment::ldp: return 100000;
    default: return 1;
    }
}

/// ASCLT_THREADS, or 0 (auto) when unset or unparsable.
[[nodiscard]] inline std::size_t threads_from_env()
{
    char const* env = std::getenv("ASCLT_THREADS");
    if (!env)
        return 0;
    std::size_t v = 0;
    std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return (ec == std::errc{} && ptr == s.data() + s.size()) ? v : 0;
}

namespace detail
{
class Resolver
{
  public:
    Resolver(RawConfig const& cfg, Experiment e) : cfg_{cfg}, e_{e} {}

    [[nodiscard]] ConfigEntry const* get(std::string_view key) const { return cfg_.find(key); }

    [[nodiscard]] std::string origin(std::string_view key) const
    {
        auto const* entry = get(key);
        return entry ? entry->origin : std::string(key);
    }

    [[noreturn]] void fail(std::string_view key, std::string const& what) const
    {
        throw ConfigError(origin(key) + ": " + what);
    }

    [[nodiscard]] std::optional<std::uint64_t> u64(std::string_view key) const
    {
        auto const* entry = get(key);
        if (!entry)
            return std::nullopt;
        std::uint64_t v = 0;
        auto const& s = entry->value;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
            fail(key, "'" + std::string(key) + "' must be a nonnegative integer, got '" + s + "'");
        return v;
    }

    [[nodiscard]] std::optional<double> real(std::string_view key) const
    {
        auto const* entry = get(key);
        if (!entry)
            return std::nullopt;
        double v = 0.0;
        auto const& s = entry->value;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v))
            fail(key, "'" + std::string(key) + "' must be a finite number, got '" + s + "'");
        return v;
    }

    [[nodiscard]] std::optional<bool> boolean(std::string_view key) const
    {
        auto const* entry = get(key);
        if (!entry)
            return std::nullopt;
        auto const& s = entry->value;
        if (s == "true" || s == "1" || s == "yes" || s.empty())
            return true;
        if (s == "false" || s == "0" || s == "no")
            return false;
        fail(key, "'" + std::string(key) + "' must be true or false, got '" + s + "'");
    }

    [[nodiscard]] std::string text(std::string_view key, std::string fallback) const
    {
        auto const* entry = get(key);
        return entry ? entry->value : std::move(fallback);
    }

    [[nodiscard]] std::size_t required_size(std::string_view key) const
    {
        auto v = u64(key);
        if (!v)
            throw ConfigError(std::string(experiment_name(e_)) + ": missing required key '" + std::string(key) + "'");
        return static_cast<std::size_t>(*v);
    }

    void check_allowed() const
    {
        auto const keys = config_keys(e_);
        for (auto const& [key, entry] : cfg_.entries)
            if (std::find(keys.begin(), keys.end(), key) == keys.end())
                throw ConfigError(entry.origin + ": key '" + key + "' does not apply to "
                                  + std::string(experiment_name(e_)));
    }

  private:
    RawConfig const& cfg_;
    Experiment e_;
};
} // namespace detail

/// Interprets a raw configuration for experiment `e` and checks every
/// precondition the experiment will rely on.
[[nodiscard]] inline RunConfig resolve_config(RawConfig const& cfg, Experiment e)
{
    detail::Resolver const rs(cfg, e);
    rs.check_allowed();
    RunConfig rc;
    rc.experiment = e;

    std::uint64_t const seed = rs.u64("master_seed").value_or(0);
    std::uint64_t const stream = rs.u64("stream_id").value_or(0);
    try
    {
        rc.source = parse_source(rs.text("family", "rademacher"), rs.text("params", ""), seed, stream);
    }
    catch (std::invalid_argument const& ex)
    {
        rs.fail(cfg.find("params") ? "params" : "family", ex.what());
    }

    if (auto const* w = cfg.find("weights"))
    {
        try
        {
            rc.weights = parse_weight_kind(w->value);
        }
        catch (std::invalid_argument const& ex)
        {
            rs.fail("weights", ex.what());
        }
    }
    rc.output_dir = rs.text("output_dir", ".");
    rc.threads = static_cast<std::size_t>(rs.u64("threads").value_or(threads_from_env()));
    rc.dump_sums = rs.boolean("dump_sums").value_or(false);
    rc.replicas = static_cast<std::size_t>(rs.u64("replicas").value_or(default_replicas(e)));
    rc.x = rs.real("x").value_or(0.0);
    rc.s = rs.real("s").value_or(1.0);
    rc.t = rs.real("t").value_or(0.0);
    rc.a = rs.real("a").value_or(0.5);
    rc.delta = rs.real("delta").value_or(1.0);
    rc.mean = rs.real("mean").value_or(0.0);
    rc.sigma = rs.real("sigma").value_or(1.0);
    rc.u_csv = rs.text("u_csv", "");
    rc.v_csv = rs.text("v_csv", "");

    if (auto const* g = cfg.find("gram"))
    {
        if (g->value == "direct")
            rc.gram = GramMethod::direct;
        else if (g->value != "auto")
            rs.fail("gram", "'gram' must be auto or direct, got '" + g->value + "'");
    }

    if (auto const* p = cfg.find("sum_path"))
    {
        if (p->value == "naive")
            rc.sum_path = SumPath::naive;
        else if (p->value == "fast")
            rc.sum_path = SumPath::fast;
        else if (p->value != "auto")
            rs.fail("sum_path", "'sum_path' must be auto, naive or fast, got '" + p->value + "'");
        if (rc.sum_path == SumPath::fast && rc.weights != WeightKind::trig)
            rs.fail("sum_path", "the fast path needs trig weights");
    }

    if (cfg.find("schedule"))
    {
        try
        {
            rc.schedule = Schedule::parse(cfg.find("schedule")->value);
            rc.schedule->validate_for(e == Experiment::asclt ? rc.weights : WeightKind::trig);
        }
        catch (std::invalid_argument const& ex)
        {
            rs.fail("schedule", ex.what());
        }
    }
    else if (e == Experiment::asclt || e == Experiment::bivariate || e == Experiment::char_decay)
        throw ConfigError(std::string(experiment_name(e)) + ": missing required key 'schedule'");

    if (e == Experiment::asclt && rc.weights == WeightKind::custom)
        rs.fail("weights", "asclt draws its own weights; use trig or haar");

    bool const needs_nr = e == Experiment::clt_fluct || e == Experiment::ldp || e == Experiment::gen_weights
                          || (e == Experiment::check_weights && rc.u_csv.empty());
    if (needs_nr)
    {
        rc.n = rs.required_size("n");
        bool const trig = e == Experiment::clt_fluct || e == Experiment::ldp || rc.weights == WeightKind::trig;
        if (trig && rc.n < 3)
            rs.fail("n", "trig weights need n >= 3");
        std::size_t const r_max = trig ? max_trig_rows(std::max<std::size_t>(rc.n, 3)) : rc.n;
        rc.r = static_cast<std::size_t>(rs.u64("r").value_or(r_max));
        if (rc.r < 1)
            rs.fail("r", "r must be at least 1");
        if (rc.r > r_max)
            rs.fail("r", "r = " + std::to_string(rc.r) + " violates "
                             + (trig ? "r <= floor((n-1)/2) = " : "r <= n = ") + std::to_string(r_max)
                             + (trig ? " for trig weights" : ""));
        if ((e == Experiment::check_weights || e == Experiment::gen_weights) && rc.weights == WeightKind::custom)
            rs.fail("weights", "custom weights are read with u_csv");
    }
    if (e == Experiment::check_weights && !(rc.delta > 0.0))
        rs.fail("delta", "delta must be positive");
    if ((e == Experiment::char_decay || e == Experiment::clt_fluct) && rc.replicas < min_replicas)
        rs.fail("replicas", "replicas must be at least " + std::to_string(min_replicas));
    if (e == Experiment::ldp)
    {
        if (rc.replicas < 1)
            rs.fail("replicas", "replicas must be at least 1");
        if (!(rc.a > 0.0))
            rs.fail("a", "a must be positive");
    }
    if (e == Experiment::periodogram)
    {
        auto const* sizes = cfg.find("sizes");
        if (!sizes)
            throw ConfigError("periodogram: missing required key 'sizes'");
        std::string_view rest = sizes->value;
        while (true)
        {
            auto const comma = std::min(rest.find(','), rest.size());
            std::string item(detail::trim(rest.substr(0, comma)));
            std::size_t v = 0;
            auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
            if (ec != std::errc{} || ptr != item.data() + item.size() || item.empty())
                rs.fail("sizes", "'sizes' must be a comma separated list of integers");
            if (v < 7)
                rs.fail("sizes", "periodogram sizes must be at least 7");
            if (!rc.sizes.empty() && v <= rc.sizes.back())
                rs.fail("sizes", "'sizes' must be strictly increasing");
            rc.sizes.push_back(v);
            if (comma == rest.size())
                break;
            rest = rest.substr(comma + 1);
        }
    }
    if (e == Experiment::spectrum)
    {
        rc.n = rs.required_size("n");
        std::string const name = rs.text("ensemble", "symmetric");
        if (name == "symmetric" || name == "symmetric_circulant")
            rc.ensemble = Ensemble::symmetric_circulant;
        else if (name == "reverse" || name == "reverse_circulant")
            rc.ensemble = Ensemble::reverse_circulant;
        else if (name == "palindromic")
            rc.ensemble = Ensemble::palindromic;
        else if (name == "raw" || name == "raw_circulant_dft")
            rc.ensemble = Ensemble::raw_circulant_dft;
        else
            rs.fail("ensemble", "unknown ensemble '" + name + "' (symmetric, reverse, palindromic, raw)");
        if (rc.ensemble != Ensemble::raw_circulant_dft && rc.n < 3)
            rs.fail("n", "n must be at least 3");
        if (rc.ensemble == Ensemble::palindromic && rc.n > palindromic_dense_limit)
            rs.fail("n", "palindromic spectra use a dense solver; n must be at most "
                             + std::to_string(palindromic_dense_limit));
        if (!(rc.sigma > 0.0))
            rs.fail("sigma", "sigma must be positive");
    }
    return rc;
}

/// Reads `path` (when given), applies the flag overrides and resolves.
[[nodiscard]] inline RunConfig load_config(std::optional<std::filesystem::path> const& path, Experiment e,
                                           std::vector<std::pair<std::string, std::string>> const& flags = {})
{
    RawConfig cfg = path ? load_raw_config(*path) : RawConfig{};
    apply_overrides(cfg, flags);
    return resolve_config(cfg, e);
}

} // namespace asclt

#endif
