#ifndef ASCLT_CLI_HPP
#define ASCLT_CLI_HPP

// Command-line front end. Exit codes: 0 success, 2 configuration or usage
// error, 3 failure while running.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "asclt/config.hpp"
#include "asclt/experiments.hpp"
#include "asclt/io.hpp"
#include "asclt/transform.hpp"
#include "asclt/weights.hpp"

namespace asclt
{

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_runtime = 3;

namespace detail
{
struct FlagSpec
{
    std::string_view key;
    std::string_view names; ///< CLI11 name list
    std::string_view help;
};

inline constexpr FlagSpec flag_specs[] = {
    {"family", "--family", "input law: rademacher, uniform, two_point, normal, exponential, zero, heterogeneous"},
    {"params", "--params", "law parameters (two_point: p; heterogeneous: law[:p],law[:p],...)"},
    {"master_seed", "--seed,--master-seed", "master seed"},
    {"stream_id", "--stream,--stream-id", "stream id of the input sequence"},
    {"output_dir", "--out,--output-dir", "directory for JSON and CSV artifacts"},
    {"threads", "--threads", "worker threads (0 = one per core; default from ASCLT_THREADS)"},
    {"weights", "--weights,--kind", "weight kind: trig, haar or custom"},
    {"n", "--n", "number of inputs n"},
    {"r", "--r", "number of weighted sums r"},
    {"delta", "--delta", "exponent delta > 0 of the (log(1+r))^(1+delta) scale"},
    {"gram", "--gram", "Gram evaluation: auto or direct"},
    {"u_csv", "--u-csv", "CSV file with the rows of a custom U"},
    {"v_csv", "--v-csv", "CSV file with the rows of a custom V"},
    {"schedule", "--schedule", "schedule n:r,n:r,... with n strictly increasing"},
    {"sum_path", "--sum-path", "partial sums: auto, naive or fast (trig only)"},
    {"s", "--s", "first argument of the characteristic function"},
    {"t", "--t", "second argument of the characteristic function"},
    {"x", "--x", "evaluation point of the empirical CDF"},
    {"a", "--a", "tail threshold a > 0 for the empirical mean"},
    {"replicas", "--replicas", "number of independent replicas"},
    {"sizes", "--sizes", "comma separated list of n"},
    {"ensemble", "--ensemble", "symmetric, reverse, palindromic or raw"},
    {"mean", "--mean", "centering constant m"},
    {"sigma", "--sigma", "scale sigma > 0"},
};

struct Subcommand
{
    Experiment experiment;
    CLI::App* app = nullptr;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    std::string config_path;
    CLI::Option* config_option = nullptr;
    bool dump_sums = false;
    CLI::Option* dump_option = nullptr;
};

[[nodiscard]] inline std::string_view description(Experiment e)
{
    switch (e)
    {
    case Experiment::check_weights: return "measure the almost-orthogonality residuals of a weight matrix pair";
    case Experiment::asclt: return "KS distance of the weighted-sum empirical measure to N(0,1) along a schedule";
    case Experiment::bivariate: return "joint CDF of (S, T) against Phi(x)Phi(y) on a 9 x 9 grid";
    case Experiment::char_decay: return "variance decay of the random characteristic function";
    case Experiment::clt_fluct: return "fluctuations of the empirical CDF at a point";
    case Experiment::ldp: return "large-deviation rate of the empirical mean";
    case Experiment::periodogram: return "periodogram ordinates against Exp(1)";
    case Experiment::spectrum: return "spectrum of a circulant-type random matrix";
    case Experiment::gen_weights: return "write a weight matrix as CSV";
    }
    return "";
}

[[nodiscard]] inline std::string short_number(double v)
{
    if (!std::isfinite(v))
        return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline void print_summary(ExperimentResult const& res, std::ostream& out)
{
    for (auto const& p : res.points)
    {
        out << res.experiment << " n=" << p.n << " r=" << p.r;
        for (auto const& [k, v] : p.values)
            out << ' ' << k << '=' << short_number(v);
        for (auto const& [k, v] : p.flags)
            out << ' ' << k << '=' << (v ? "true" : "false");
        out << '\n';
    }
}

class ArtifactWriter
{
  public:
    ArtifactWriter(std::string const& dir, std::string const& experiment, std::uint64_t seed, std::string timestamp)
        : timestamp_{std::move(timestamp)}
    {
        std::filesystem::create_directories(dir);
        stem_ = (std::filesystem::path(dir) / (experiment + "-" + std::to_string(seed) + "-" + timestamp_)).string();
    }

    [[nodiscard]] std::string const& timestamp() const noexcept { return timestamp_; }

    template <class Fn>
    std::string write(std::string const& suffix, Fn&& fn)
    {
        std::string const path = stem_ + suffix;
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write " + path);
        fn(out);
        if (!out)
            throw std::runtime_error("error while writing " + path);
        written_.push_back(path);
        return path;
    }

    [[nodiscard]] std::vector<std::string> const& written() const noexcept { return written_; }

  private:
    std::string timestamp_;
    std::string stem_;
    std::vector<std::string> written_;
};

[[nodiscard]] inline WeightMatrixPair build_weights(RunConfig const& rc)
{
    if (!rc.u_csv.empty())
    {
        auto read = [](std::string const& path) {
            std::ifstream in(path);
            if (!in)
                throw ConfigError("cannot read matrix file " + path);
            try
            {
                return parse_matrix_csv(in);
            }
            catch (std::invalid_argument const& ex)
            {
                throw ConfigError(path + ": " + ex.what());
            }
        };
        auto const u = read(rc.u_csv);
        std::optional<std::vector<std::vector<double>>> v;
        if (!rc.v_csv.empty())
            v = read(rc.v_csv);
        try
        {
            return custom_weights(u, v);
        }
        catch (std::invalid_argument const& ex)
        {
            throw ConfigError(ex.what());
        }
    }
    if (rc.weights == WeightKind::trig)
        return WeightMatrixPair::trig(rc.n, rc.r);
    return haar_rows(rc.n, rc.r, rc.source);
}

[[nodiscard]] inline ExperimentResult check_weights_result(RunConfig const& rc, WeightMatrixPair const& w)
{
    Stopwatch clock;
    if (w.rows() > w.cols())
        throw ConfigError("weight matrix has more rows (" + std::to_string(w.rows()) + ") than columns ("
                          + std::to_string(w.cols()) + ")");
    ConditionReport const rep = check_conditions(w, rc.delta, rc.gram);
    auto res = make_result("check-weights", rc.source, w.kind(), Schedule::single(w.cols(), w.rows()), 1);
    res.parameters = {{"delta", rc.delta}};
    PointStats st;
    st.n = rep.n;
    st.r = rep.r;
    double const nan = std::numeric_limits<double>::quiet_NaN();
    st.set("eps_entry_u", rep.eps_entry_u);
    st.set("eps_entry_v", rep.eps_entry_v.value_or(nan));
    st.set("eps_orth_u", rep.eps_orth_u);
    st.set("eps_orth_v", rep.eps_orth_v.value_or(nan));
    st.set("eps_cross", rep.eps_cross.value_or(nan));
    st.set("log_scale", rep.log_scale);
    st.set("entry_sqrt_n", rep.eps_entry_u * std::sqrt(static_cast<double>(rep.n)));
    if (w.kind() == WeightKind::trig)
    {
        double const tol = static_cast<double>(rep.n) * std::ldexp(1.0, -46);
        auto const id = verify_trig_identities(rep.n, tol);
        st.set("identity_max_residual", id.max_residual);
        st.set_flag("trig_identities_pass", id.passed);
    }
    res.points.push_back(std::move(st));
    res.wall_clock_seconds = clock.seconds();
    return res;
}

inline void write_sums_csv(ExperimentResult const& res, RunConfig const& rc, std::ostream& out)
{
    out << "n,r,k,s,t\n";
    for (auto const& p : res.schedule.points())
    {
        WeightMatrixPair const w = rc.weights == WeightKind::haar_orthogonal ? haar_rows(p.n, p.r, rc.source)
                                                                              : WeightMatrixPair::trig(p.n, p.r);
        PartialSums const sums = partial_sums(w, rc.source);
        for (std::size_t k = 0; k < p.r; ++k)
            out << p.n << ',' << p.r << ',' << (k + 1) << ',' << format_double(sums.s[k]) << ','
                << (sums.t ? format_double((*sums.t)[k]) : std::string("")) << '\n';
    }
}

[[nodiscard]] inline int execute(RunConfig const& rc, std::ostream& out)
{
    std::string const ts = utc_timestamp(true);
    ExperimentResult res;
    std::optional<WeightMatrixPair> weights;
    switch (rc.experiment)
    {
    case Experiment::check_weights:
        weights = build_weights(rc);
        res = check_weights_result(rc, *weights);
        break;
    case Experiment::gen_weights:
        weights = build_weights(rc);
        res = make_result("gen-weights", rc.source, rc.weights, Schedule::single(rc.n, rc.r), 1);
        {
            PointStats st;
            st.n = rc.n;
            st.r = rc.r;
            res.points.push_back(std::move(st));
        }
        break;
    case Experiment::asclt:
        res = asclt_trajectory(rc.source, *rc.schedule, rc.weights, rc.threads, rc.sum_path);
        break;
    case Experiment::bivariate: res = asclt_bivariate(rc.source, *rc.schedule, rc.threads, rc.sum_path); break;
    case Experiment::char_decay:
        res = char_variance_decay(rc.source, *rc.schedule, rc.s, rc.t, rc.replicas, rc.threads);
        break;
    case Experiment::clt_fluct: res = clt_fluctuation(rc.source, rc.n, rc.r, rc.x, rc.replicas, rc.threads); break;
    case Experiment::ldp: res = ldp_rate(rc.source, rc.n, rc.r, rc.a, rc.replicas, rc.threads); break;
    case Experiment::periodogram: res = periodogram_experiment(rc.source, rc.sizes, rc.threads); break;
    case Experiment::spectrum:
        res = spectrum_experiment(rc.ensemble, rc.n, rc.source, Standardization{rc.mean, rc.sigma});
        break;
    }

    print_summary(res, out);

    ArtifactWriter writer(rc.output_dir, res.experiment, rc.source.master_seed(), ts);
    writer.write(".json", [&](std::ostream& o) { dump_json(to_json(res, utc_timestamp(false)), o); });
    if (res.spectrum)
        writer.write(".csv", [&](std::ostream& o) { write_spectrum_csv(*res.spectrum, o); });
    else
        writer.write(".csv", [&](std::ostream& o) { write_points_csv(res, o); });
    if (!res.replica_table.rows.empty())
        writer.write("-replicas.csv", [&](std::ostream& o) { write_replicas_csv(res.replica_table, o); });
    if (rc.experiment == Experiment::gen_weights)
    {
        writer.write("-u.csv", [&](std::ostream& o) { write_matrix_csv(*weights, o); });
        if (weights->has_v())
            writer.write("-v.csv", [&](std::ostream& o) { write_matrix_csv(*weights, o, true); });
    }
    if (rc.dump_sums && res.experiment != "bivariate")
        writer.write("-sums.csv", [&](std::ostream& o) { write_sums_csv(res, rc, o); });
    if (rc.dump_sums && res.experiment == "bivariate")
    {
        RunConfig trig = rc;
        trig.weights = WeightKind::trig;
        writer.write("-sums.csv", [&](std::ostream& o) { write_sums_csv(res, trig, o); });
    }
    for (auto const& path : writer.written())
        out << "wrote " << path << '\n';
    return exit_ok;
}
} // namespace detail

/// Entry point of the `asclt` tool.
[[nodiscard]] inline int run(int argc, char const* const* argv, std::ostream& out = std::cout,
                             std::ostream& err = std::cerr)
{
    CLI::App app{"Almost-sure CLT experiments for weighted sums with almost-orthogonal weights", "asclt"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "show help for every subcommand");

    std::vector<detail::Subcommand> subs;
    subs.reserve(std::size(all_experiments));
    for (Experiment e : all_experiments)
    {
        auto& sub = subs.emplace_back();
        sub.experiment = e;
        sub.app = app.add_subcommand(std::string(experiment_name(e)), std::string(detail::description(e)));
        auto const keys = config_keys(e);
        for (auto const& spec : detail::flag_specs)
        {
            if (std::find(keys.begin(), keys.end(), spec.key) == keys.end())
                continue;
            std::string const key(spec.key);
            sub.options[key] = sub.app->add_option(std::string(spec.names), sub.values[key], std::string(spec.help));
        }
        sub.config_option = sub.app->add_option("--config", sub.config_path, "key = value configuration file");
        if (std::find(keys.begin(), keys.end(), "dump_sums") != keys.end())
            sub.dump_option = sub.app->add_flag("--dump-sums", sub.dump_sums, "also write every S_{n,k}, T_{n,k}");
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::CallForHelp const& e)
    {
        return app.exit(e, out, err);
    }
    catch (CLI::CallForAllHelp const& e)
    {
        return app.exit(e, out, err);
    }
    catch (CLI::ParseError const& e)
    {
        err << "error: " << e.what() << "\n\n" << app.help();
        return exit_config;
    }

    for (auto& sub : subs)
    {
        if (!sub.app->parsed())
            continue;
        RunConfig rc;
        try
        {
            std::vector<std::pair<std::string, std::string>> flags;
            for (auto const& [key, opt] : sub.options)
                if (opt->count() > 0)
                    flags.emplace_back(key, sub.values[key]);
            if (sub.dump_option && sub.dump_option->count() > 0)
                flags.emplace_back("dump_sums", "true");
            std::optional<std::filesystem::path> path;
            if (sub.config_option->count() > 0)
                path = sub.config_path;
            rc = load_config(path, sub.experiment, flags);
        }
        catch (ConfigError const& e)
        {
            err << "config error: " << e.what() << "\n\n" << sub.app->help();
            return exit_config;
        }
        try
        {
            return detail::execute(rc, out);
        }
        catch (ConfigError const& e)
        {
            err << "config error: " << e.what() << '\n';
            return exit_config;
        }
        catch (std::exception const& e)
        {
            err << "error: " << e.what() << '\n';
            return exit_runtime;
        }
    }
    err << app.help();
    return exit_config;
}

} // namespace asclt

#endif
