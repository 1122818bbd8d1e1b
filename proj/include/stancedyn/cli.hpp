#pragma once

// Command-line driver. Every subcommand reads its inputs, writes its reports
// into --out (each file written to a temp name and renamed into place) and
// records a manifest.json with parameters and output checksums.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stancedyn/ccm.hpp"
#include "stancedyn/classify.hpp"
#include "stancedyn/cohort.hpp"
#include "stancedyn/csv.hpp"
#include "stancedyn/dynamics.hpp"
#include "stancedyn/error.hpp"
#include "stancedyn/ingest.hpp"
#include "stancedyn/mutual_info.hpp"
#include "stancedyn/stationarity.hpp"
#include "stancedyn/syngen.hpp"
#include "stancedyn/threads.hpp"
#include "stancedyn/topics.hpp"
#include "stancedyn/version.hpp"

namespace stancedyn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

inline std::string checksum(std::string_view bytes) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(bytes);
    return os.str();
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

/// Collects report files and writes them atomically with a manifest.
class OutputSink {
public:
    OutputSink(std::optional<std::string> dir, std::ostream& stdout_stream)
        : dir_(std::move(dir)), stdout_(stdout_stream) {
        if (dir_) fs::create_directories(*dir_);
    }

    bool to_directory() const { return dir_.has_value(); }

    /// Without --out only the primary report goes to stdout.
    void write(const std::string& name, const std::string& content, bool primary = false) {
        if (!dir_) {
            if (primary) stdout_ << content;
            return;
        }
        const fs::path final_path = fs::path(*dir_) / name;
        const fs::path tmp = fs::path(*dir_) / ("." + name + ".tmp");
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw DataError("cannot write " + tmp.string());
            out << content;
            if (!out.flush()) throw DataError("write failed for " + tmp.string());
        }
        fs::rename(tmp, final_path);
        checksums_[name] = checksum(content);
    }

    void finish(const std::string& command, const json& inputs, const json& parameters) {
        if (!dir_) return;
        json manifest = {{"command", command},
                         {"tool_version", version},
                         {"inputs", inputs},
                         {"parameters", parameters},
                         {"outputs", checksums_}};
        write("manifest.json", manifest.dump(2) + "\n");
    }

private:
    std::optional<std::string> dir_;
    std::ostream& stdout_;
    std::map<std::string, std::string> checksums_;
};

struct CommonOptions {
    std::string input = "-";
    std::string precision_path;
    std::optional<double> alpha_anti;
    std::optional<double> alpha_pro;
    std::string alpha_source = "global";
    double epsilon = 0.05;
    std::string mode = "as-written";
    std::optional<std::string> out;
    std::uint64_t seed = 7;
    unsigned threads = 1;
    std::string start;
    bool strict = false;
    double min_dual_prob = 0.0;
};

struct Context {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
};

inline Dataset load_dataset(const std::string& path, const CommonOptions& o, Context& ctx, json& inputs,
                            ParseReport* report = nullptr) {
    ParseOptions po;
    po.strict = o.strict;
    if (!o.start.empty()) {
        po.dataset_start = parse_iso8601(o.start);
        if (!po.dataset_start) throw UsageError("bad --start '" + o.start + "'");
    }
    ParseReport rep;
    Dataset ds;
    if (path == "-") {
        std::ostringstream buf;
        buf << ctx.in.rdbuf();
        const std::string bytes = buf.str();
        std::istringstream is(bytes);
        ds = parse_records(is, po, &rep);
        inputs.push_back({{"path", "-"}, {"checksum", checksum(bytes)}});
    } else {
        const std::string bytes = read_file(path);
        std::istringstream is(bytes);
        ds = parse_records(is, po, &rep);
        inputs.push_back({{"path", path}, {"checksum", checksum(bytes)}});
    }
    if (rep.skipped > 0) ctx.err << "skipped " << rep.skipped << " malformed line(s)\n";
    if (report) *report = rep;
    return ds;
}

inline PrecisionModel load_precision(const CommonOptions& o, json& inputs) {
    if (!o.precision_path.empty()) {
        if (o.alpha_anti || o.alpha_pro) throw UsageError("use either --precision or --alpha-anti/--alpha-pro");
        const std::string bytes = read_file(o.precision_path);
        std::istringstream is(bytes);
        inputs.push_back({{"path", o.precision_path}, {"checksum", checksum(bytes)}});
        return load_precision_model(is);
    }
    if (!o.alpha_anti || !o.alpha_pro) throw UsageError("precision required: --precision PATH or --alpha-anti X --alpha-pro Y");
    return PrecisionModel(AlphaPair{*o.alpha_anti, *o.alpha_pro});
}

inline AlphaSource alpha_source(const CommonOptions& o) {
    if (o.alpha_source == "global") return AlphaSource::Global;
    if (o.alpha_source == "period") return AlphaSource::PerPeriod;
    throw UsageError("--alpha-source must be global or period");
}

inline ClassifyParams classify_params(const CommonOptions& o, json& inputs) {
    ClassifyParams p;
    p.precision = load_precision(o, inputs);
    p.alpha_source = alpha_source(o);
    const auto mode = parse_mode(o.mode);
    if (!mode) throw UsageError("--mode must be exact or as-written");
    p.mode = *mode;
    if (!(o.epsilon >= 0.0 && o.epsilon < 0.5)) throw UsageError("--epsilon must lie in [0, 0.5)");
    p.epsilon = o.epsilon;
    p.min_dual_probability = o.min_dual_prob;
    p.threads = o.threads;
    return p;
}

inline json common_parameters(const CommonOptions& o) {
    json p = {{"alpha_source", o.alpha_source}, {"epsilon", o.epsilon}, {"mode", o.mode},
              {"strict", o.strict},             {"start", o.start},     {"min_dual_prob", o.min_dual_prob}};
    if (o.alpha_anti) p["alpha_anti"] = *o.alpha_anti;
    if (o.alpha_pro) p["alpha_pro"] = *o.alpha_pro;
    if (!o.precision_path.empty()) p["precision"] = o.precision_path;
    return p;
}

inline std::vector<double> parse_doubles(const std::string& s, const char* flag) {
    std::vector<double> out;
    for (const auto& f : csv::split(s)) {
        try {
            out.push_back(csv::to_double(f, flag));
        } catch (const DataError& e) {
            throw UsageError(e.what());
        }
    }
    return out;
}

inline std::vector<std::size_t> parse_sizes(const std::string& s, const char* flag) {
    std::vector<std::size_t> out;
    for (const auto& f : csv::split(s)) {
        long long v = 0;
        try {
            v = csv::to_int(f, flag);
        } catch (const DataError& e) {
            throw UsageError(e.what());
        }
        if (v < 1) throw UsageError(std::string(flag) + " values must be positive");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

// ---- report formatting ----

inline std::string classify_csv(const std::vector<LeaningResult>& results) {
    std::ostringstream os;
    os << "user_id,n_a,n_p,p_dual,pr_pro,pr_anti,pr_bal,class\n";
    for (const auto& r : results)
        os << csv::quote(r.user_id) << ',' << r.n_a << ',' << r.n_p << ',' << csv::num(r.dual_probability) << ','
           << csv::num(r.probabilities.pr_pro) << ',' << csv::num(r.probabilities.pr_anti) << ','
           << csv::num(r.probabilities.pr_bal) << ',' << to_string(r.cls) << '\n';
    return os.str();
}

inline std::string series_csv(const StanceChangeSeries& s, std::int32_t day_offset = 0) {
    std::ostringstream os;
    os << "day,delta_plus,delta_minus,diff,cumulative\n";
    const auto diff = s.diff();
    const auto cum = s.cumulative();
    for (std::size_t n = 0; n < s.delta_plus.size(); ++n)
        os << static_cast<std::int64_t>(n) + day_offset << ',' << s.delta_plus[n] << ',' << s.delta_minus[n] << ','
           << diff[n] << ',' << cum[n] << '\n';
    return os.str();
}

/// Reads a series CSV as written by `dynamics`.
inline StanceChangeSeries load_series_csv(const std::string& path, json& inputs) {
    const std::string bytes = read_file(path);
    inputs.push_back({{"path", path}, {"checksum", checksum(bytes)}});
    std::istringstream is(bytes);
    csv::expect_header(is, "day,delta_plus,delta_minus,diff,cumulative", "series");
    StanceChangeSeries s;
    std::string line;
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto f = csv::split(line);
        if (f.size() != 5) throw DataError("series: expected 5 fields");
        s.delta_plus.push_back(csv::to_int(f[1], "delta_plus"));
        s.delta_minus.push_back(csv::to_int(f[2], "delta_minus"));
    }
    s.day_count = static_cast<std::int32_t>(s.delta_plus.size());
    return s;
}

inline StanceChangeSeries series_from_dataset(const Dataset& ds, unsigned threads) {
    return aggregate_series(all_user_changes(ds, threads), ds.day_count());
}

// ---- subcommands ----

inline int cmd_ingest_check(const CommonOptions& o, Context& ctx) {
    json inputs = json::array();
    ParseReport rep;
    const auto ds = load_dataset(o.input, o, ctx, inputs, &rep);
    const auto users = aggregate_users(ds);
    std::size_t dual = 0;
    std::int64_t anti = 0, pro = 0, neutral = 0;
    for (const auto& [_, u] : users) {
        dual += u.dual_detected();
        anti += u.n_a;
        pro += u.n_p;
        neutral += u.n_neutral;
    }
    json summary = {{"lines", rep.lines},
                    {"accepted", rep.accepted},
                    {"skipped", rep.skipped},
                    {"messages", rep.messages},
                    {"users", users.size()},
                    {"dual_detected_users", dual},
                    {"anti_tweets", anti},
                    {"pro_tweets", pro},
                    {"neutral_tweets", neutral},
                    {"dataset_start", format_iso8601(ds.dataset_start())},
                    {"day_count", ds.day_count()}};
    OutputSink sink(o.out, ctx.out);
    sink.write("ingest_summary.json", summary.dump(2) + "\n", true);
    sink.finish("ingest-check", inputs, common_parameters(o));
    return 0;
}

inline int cmd_cohort(const CommonOptions& o, Context& ctx) {
    json inputs = json::array();
    const auto ds = load_dataset(o.input, o, ctx, inputs);
    const auto pm = load_precision(o, inputs);
    const auto src = alpha_source(o);
    auto users = aggregate_users(ds);
    assign_dual_probabilities(users, pm, src, o.threads);
    const auto est = effective_cohort_size(users, pm, src, o.threads);
    std::ostringstream os;
    os << "user_id,n_a,n_p,p_dual\n";
    for (const auto& [id, u] : users)
        if (u.dual_detected()) os << csv::quote(id) << ',' << u.n_a << ',' << u.n_p << ',' << csv::num(u.dual_probability) << '\n';
    json summary = {{"users", users.size()},
                    {"dual_detected_users", est.users},
                    {"effective_cohort_size", est.effective},
                    {"effective_cohort_size_min", est.effective_min},
                    {"effective_cohort_size_max", est.effective_max},
                    {"alpha_source", o.alpha_source}};
    OutputSink sink(o.out, ctx.out);
    sink.write("cohort.csv", os.str(), true);
    sink.write("cohort_summary.json", summary.dump(2) + "\n");
    sink.finish("cohort", inputs, common_parameters(o));
    return 0;
}

inline json class_counts(const std::vector<LeaningResult>& results) {
    std::map<std::string, std::size_t> counts{{"pro-leaning", 0}, {"anti-leaning", 0}, {"balanced", 0}};
    for (const auto& r : results) ++counts[std::string(to_string(r.cls))];
    return counts;
}

inline int cmd_classify(const CommonOptions& o, Context& ctx) {
    json inputs = json::array();
    const auto ds = load_dataset(o.input, o, ctx, inputs);
    const auto params = classify_params(o, inputs);
    const auto results = classify_users(aggregate_users(ds), params);
    json summary = {{"users", results.size()}, {"mode", to_string(params.mode)}, {"epsilon", params.epsilon},
                    {"classes", class_counts(results)}};
    OutputSink sink(o.out, ctx.out);
    sink.write("classify.csv", classify_csv(results), true);
    sink.write("classify_summary.json", summary.dump(2) + "\n");
    sink.finish("classify", inputs, common_parameters(o));
    return 0;
}

inline int cmd_sweep(const CommonOptions& o, const std::string& grid_spec, Context& ctx) {
    json inputs = json::array();
    const auto ds = load_dataset(o.input, o, ctx, inputs);
    const auto params = classify_params(o, inputs);
    std::vector<double> grid;
    if (grid_spec.empty()) {
        for (int i = 0; i <= 40; ++i) grid.push_back(i * 0.005);
    } else {
        grid = parse_doubles(grid_spec, "--grid");
    }
    std::vector<SweepRow> rows;
    try {
        rows = sweep_epsilon(classify_users(aggregate_users(ds), params), grid);
    } catch (const std::domain_error& e) {
        throw UsageError(e.what());
    }
    std::ostringstream os;
    os << "epsilon,pro,anti,bal\n";
    for (const auto& r : rows) os << csv::num(r.epsilon) << ',' << r.pro << ',' << r.anti << ',' << r.bal << '\n';
    auto p = common_parameters(o);
    p["grid"] = grid;
    OutputSink sink(o.out, ctx.out);
    sink.write("sweep.csv", os.str(), true);
    sink.finish("sweep-eps", inputs, p);
    return 0;
}

inline int cmd_migrate(const CommonOptions& o, const std::string& after_path, Context& ctx) {
    json inputs = json::array();
    const auto before = load_dataset(o.input, o, ctx, inputs);
    CommonOptions after_opts = o;
    after_opts.start = format_iso8601(before.dataset_start());
    const auto after = load_dataset(after_path, after_opts, ctx, inputs);
    const auto params = classify_params(o, inputs);
    const auto classified = classify_users(aggregate_users(before), params);
    const auto m = migration_matrix(classified, aggregate_users(after), params);
    std::ostringstream os;
    os << "from";
    for (auto c : all_classes) os << ',' << to_string(c);
    os << '\n';
    for (auto from : {LeaningClass::ProLeaning, LeaningClass::AntiLeaning, LeaningClass::Balanced}) {
        os << to_string(from);
        for (auto to : all_classes) os << ',' << m.at(from, to);
        os << '\n';
    }
    json summary = {{"missing_users", m.missing}, {"classified_users", classified.size()},
                    {"before_classes", class_counts(classified)}};
    OutputSink sink(o.out, ctx.out);
    sink.write("migration.csv", os.str(), true);
    sink.write("migration_summary.json", summary.dump(2) + "\n");
    sink.finish("migrate", inputs, common_parameters(o));
    return 0;
}

inline int cmd_dynamics(const CommonOptions& o, std::optional<std::int32_t> split_day, const std::string& events_path,
                        Context& ctx) {
    json inputs = json::array();
    const auto ds = load_dataset(o.input, o, ctx, inputs);
    const auto changes = all_user_changes(ds, o.threads);
    const auto series = aggregate_series(changes, ds.day_count());
    OutputSink sink(o.out, ctx.out);
    sink.write("series.csv", series_csv(series), true);
    if (split_day) {
        const auto d = std::clamp<std::int32_t>(*split_day, 0, series.day_count);
        sink.write("series_pre.csv", series_csv(window(series, 0, d)));
        sink.write("series_post.csv", series_csv(window(series, d, series.day_count), d));
    }
    std::int64_t into_pro = 0, into_anti = 0;
    for (const auto& u : changes) {
        into_pro += u.into_pro;
        into_anti += u.into_anti;
    }
    json summary = {{"users_with_changes", changes.size()},
                    {"changes_into_pro", into_pro},
                    {"changes_into_anti", into_anti},
                    {"day_count", series.day_count}};
    if (!events_path.empty()) {
        // event markers: CSV `date,label`, converted to day indexes for overlays
        const std::string bytes = read_file(events_path);
        inputs.push_back({{"path", events_path}, {"checksum", checksum(bytes)}});
        std::istringstream is(bytes);
        csv::expect_header(is, "date,label", "events");
        std::ostringstream ev;
        ev << "day,label\n";
        std::string line;
        while (std::getline(is, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            const auto f = csv::split(line);
            if (f.size() != 2) throw DataError("events: expected 2 fields");
            const auto t = parse_iso8601(f[0]);
            if (!t) throw DataError("events: bad date '" + f[0] + "'");
            const auto day = std::chrono::floor<std::chrono::days>(*t - ds.dataset_start()).count();
            ev << day << ',' << csv::quote(f[1]) << '\n';
        }
        sink.write("events.csv", ev.str());
    }
    sink.write("dynamics_summary.json", summary.dump(2) + "\n");
    auto p = common_parameters(o);
    if (split_day) p["split_day"] = *split_day;
    sink.finish("dynamics", inputs, p);
    return 0;
}

inline StanceChangeSeries series_input(const CommonOptions& o, const std::string& series_path, Context& ctx,
                                       json& inputs) {
    if (!series_path.empty()) return load_series_csv(series_path, inputs);
    return series_from_dataset(load_dataset(o.input, o, ctx, inputs), o.threads);
}

inline json adf_json(const AdfResult& r) {
    return {{"statistic", r.statistic}, {"critical_5pct", r.critical_5pct},
            {"reject_unit_root_at_5pct", r.reject_unit_root_at_5pct}, {"lag_used", r.lag_used}, {"nobs", r.nobs}};
}

inline json kpss_json(const KpssResult& r) {
    return {{"statistic", r.statistic}, {"critical_5pct", r.critical_5pct},
            {"reject_stationarity_at_5pct", r.reject_stationarity_at_5pct}, {"bandwidth", r.bandwidth}};
}

inline json test_both(const std::vector<double>& x) {
    json j;
    try {
        j["adf"] = adf_json(adf_test(x));
    } catch (const std::exception& e) {
        j["adf"] = {{"error", e.what()}};
    }
    try {
        j["kpss"] = kpss_json(kpss_test(x));
    } catch (const std::exception& e) {
        j["kpss"] = {{"error", e.what()}};
    }
    return j;
}

inline int cmd_stationarity(const CommonOptions& o, const std::string& series_path, Context& ctx) {
    json inputs = json::array();
    const auto s = series_input(o, series_path, ctx, inputs);
    const auto plus = s.plus_as_double();
    const auto minus = s.minus_as_double();
    if (plus.size() < 21) throw DataError("stationarity: series needs at least 21 days");
    json report = {{"delta_plus", test_both(plus)},
                   {"delta_minus", test_both(minus)},
                   {"delta_plus_differenced", test_both(first_difference(plus))},
                   {"delta_minus_differenced", test_both(first_difference(minus))}};
    OutputSink sink(o.out, ctx.out);
    sink.write("stationarity.json", report.dump(2) + "\n", true);
    sink.finish("stationarity", inputs, common_parameters(o));
    return 0;
}

inline int cmd_mi(const CommonOptions& o, const std::string& series_path, int max_lag, int bins, bool raw,
                  Context& ctx) {
    json inputs = json::array();
    const auto s = series_input(o, series_path, ctx, inputs);
    auto x = s.plus_as_double();
    auto y = s.minus_as_double();
    if (!raw) {
        if (x.size() < 2) throw DataError("mi: series too short");
        x = first_difference(x);
        y = first_difference(y);
    }
    if (static_cast<std::size_t>(max_lag) + 20 > x.size())
        throw DataError("mi: series of length " + std::to_string(x.size()) + " too short for max lag " +
                        std::to_string(max_lag));
    const auto curve = mutual_information_lag(x, y, max_lag, bins);
    std::ostringstream os;
    os << "lag,mi_nats\n";
    for (const auto& p : curve.points) os << p.lag << ',' << csv::num(p.mi_nats) << '\n';
    json summary = {{"argmin", curve.argmin}, {"argmax", curve.argmax}, {"bins", bins}, {"differenced", !raw}};
    auto p = common_parameters(o);
    p["max_lag"] = max_lag;
    p["bins"] = bins;
    OutputSink sink(o.out, ctx.out);
    sink.write("mi.csv", os.str(), true);
    sink.write("mi_summary.json", summary.dump(2) + "\n");
    sink.finish("mi", inputs, p);
    return 0;
}

struct CcmFlags {
    int E = 32;
    int tau = 3;
    std::string lib_sizes;
    std::size_t samples = 50;
    std::optional<std::int32_t> split_day;
    std::string series_path;
    std::size_t exclusion_radius = 0;
    std::string e_sweep;
};

inline std::pair<std::string, json> run_ccm_window(const std::vector<double>& x, const std::vector<double>& y,
                                                   const CcmFlags& f, const CommonOptions& o) {
    const auto sizes = f.lib_sizes.empty() ? default_library_sizes(x.size(), f.E, f.tau)
                                           : parse_sizes(f.lib_sizes, "--lib-sizes");
    CcmOptions opts;
    opts.threads = o.threads;
    opts.cross_map.exclusion_radius = f.exclusion_radius;
    const auto r = skill_curve(x, y, f.E, f.tau, sizes, f.samples, o.seed, opts);
    std::ostringstream os;
    os << "library_size,skill_x_xmap_y,skill_y_xmap_x\n";
    for (std::size_t i = 0; i < r.library_sizes.size(); ++i)
        os << r.library_sizes[i] << ',' << csv::num(r.skill_x_xmap_y[i]) << ',' << csv::num(r.skill_y_xmap_x[i]) << '\n';
    const auto v = causal_compare(r);
    json side = {{"E", r.E},
                 {"tau", r.tau},
                 {"samples", r.num_samples},
                 {"seed", r.seed},
                 {"library_sizes", r.library_sizes},
                 {"x", "first difference of delta_plus"},
                 {"y", "first difference of delta_minus"},
                 {"points", x.size()},
                 {"verdict", to_string(v.driven)},
                 {"margin", v.margin},
                 {"converged", v.converged}};
    return {os.str(), side};
}

inline int cmd_ccm(const CommonOptions& o, const CcmFlags& f, Context& ctx) {
    json inputs = json::array();
    const auto s = series_input(o, f.series_path, ctx, inputs);
    OutputSink sink(o.out, ctx.out);
    json sidecar;
    auto differenced = [](const StanceChangeSeries& w) {
        if (w.delta_plus.size() < 2) throw DataError("ccm: window too short");
        return std::pair{first_difference(w.plus_as_double()), first_difference(w.minus_as_double())};
    };
    try {
        if (f.split_day) {
            const auto d = std::clamp<std::int32_t>(*f.split_day, 0, s.day_count);
            // the boundary day belongs to the post window
            for (const auto& [name, w] : {std::pair{std::string("pre"), window(s, 0, d)},
                                          std::pair{std::string("post"), window(s, d, s.day_count)}}) {
                const auto [x, y] = differenced(w);
                auto [text, side] = run_ccm_window(x, y, f, o);
                sink.write("ccm_" + name + ".csv", text, name == "pre");
                sidecar[name] = side;
            }
        } else {
            const auto [x, y] = differenced(s);
            auto [text, side] = run_ccm_window(x, y, f, o);
            sink.write("ccm.csv", text, true);
            sidecar = side;
            if (!f.e_sweep.empty()) {
                std::vector<int> dims;
                for (auto v : parse_sizes(f.e_sweep, "--e-sweep")) dims.push_back(static_cast<int>(v));
                CcmOptions opts;
                opts.threads = o.threads;
                std::ostringstream es;
                es << "E,skill_x_xmap_y,skill_y_xmap_x\n";
                for (const auto& sc : sweep_embedding_dimension(x, y, f.tau, dims, opts))
                    es << sc.E << ',' << csv::num(sc.skill_x_xmap_y) << ',' << csv::num(sc.skill_y_xmap_x) << '\n';
                sink.write("e_sweep.csv", es.str());
            }
        }
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("ccm: ") + e.what());
    }
    sink.write("ccm.json", sidecar.dump(2) + "\n");
    auto p = common_parameters(o);
    p["E"] = f.E;
    p["tau"] = f.tau;
    p["lib_sizes"] = f.lib_sizes;
    p["samples"] = f.samples;
    p["seed"] = o.seed;
    p["exclusion_radius"] = f.exclusion_radius;
    if (f.split_day) p["split_day"] = *f.split_day;
    sink.finish("ccm", inputs, p);
    return 0;
}

inline int cmd_topics(const CommonOptions& o, const std::string& lexicon_path, const std::string& denominator,
                      Context& ctx) {
    json inputs = json::array();
    const auto ds = load_dataset(o.input, o, ctx, inputs);
    if (lexicon_path.empty()) throw UsageError("topics requires --lexicon PATH");
    const std::string lex_bytes = read_file(lexicon_path);
    inputs.push_back({{"path", lexicon_path}, {"checksum", checksum(lex_bytes)}});
    std::istringstream lin(lex_bytes);
    const auto lex = load_lexicon(lin);
    Denominator denom;
    if (denominator == "dataset") denom = Denominator::Dataset;
    else if (denominator == "dual") denom = Denominator::Dual;
    else throw UsageError("--denominator must be dataset or dual");

    const auto params = classify_params(o, inputs);
    const auto users = aggregate_users(ds);
    std::map<std::string, std::string> group_of;
    for (const auto& r : classify_users(users, params)) group_of[r.user_id] = std::string(to_string(r.cls));
    if (denom == Denominator::Dataset)
        for (const auto& [id, _] : users)
            if (!group_of.count(id)) group_of[id] = "other";
    const auto rep = topic_report(ds, lex, group_of, denom, o.threads);

    std::ostringstream os;
    os << "group,topic,stance,observed,expected\n";
    for (const auto& r : rep.rows)
        os << csv::quote(r.group) << ',' << csv::quote(r.topic) << ',' << to_string(r.stance) << ',' << r.observed
           << ',' << csv::num(r.expected) << '\n';
    std::ostringstream vs;
    vs << "group,genuine_observed,genuine_expected,falsehood_observed,falsehood_expected,unclassified\n";
    for (const auto& [g, v] : rep.veracity)
        vs << csv::quote(g) << ',' << v.genuine_observed << ',' << csv::num(v.genuine_expected) << ','
           << v.falsehood_observed << ',' << csv::num(v.falsehood_expected) << ',' << v.unclassified << '\n';
    auto p = common_parameters(o);
    p["lexicon"] = lexicon_path;
    p["denominator"] = denominator;
    OutputSink sink(o.out, ctx.out);
    sink.write("topics.csv", os.str(), true);
    sink.write("veracity.csv", vs.str());
    sink.finish("topics", inputs, p);
    return 0;
}

struct ThreadFlags {
    std::int64_t reply_min_size = 10;
    std::int64_t lifespan_min_size = 1000;
    std::string attribution = "root";
    std::optional<std::int32_t> graph_day;
    double quantile = 0.5;
};

inline int cmd_threads(const CommonOptions& o, const ThreadFlags& f, Context& ctx) {
    json inputs = json::array();
    const auto ds = load_dataset(o.input, o, ctx, inputs);
    ReplyAttribution mode;
    if (f.attribution == "root") mode = ReplyAttribution::ThreadRoot;
    else if (f.attribution == "parent") mode = ReplyAttribution::ImmediateParent;
    else throw UsageError("--attribution must be root or parent");
    if (!(f.quantile > 0.0 && f.quantile <= 1.0)) throw UsageError("--quantile must lie in (0, 1]");

    const auto events = flatten_events(all_user_changes(ds, o.threads));
    const auto threads = assemble_threads(events, ds);
    const auto attribution = attribute_changes(events, ds, mode);
    const auto graph = build_signed_reply_graph(events, ds, f.graph_day);

    std::ostringstream ts;
    ts << "thread_id,kind,size,pro,anti,first_day,last_day,originator\n";
    for (const auto& t : threads)
        ts << csv::quote(t.thread_id) << ',' << to_string(t.kind) << ',' << t.change_tweet_count << ',' << t.pro_count
           << ',' << t.anti_count << ',' << t.first_day << ',' << t.last_day << ','
           << csv::quote(t.originator.value_or("")) << '\n';
    std::ostringstream gs;
    gs << "src_user,dst_user,weight,day\n";
    for (const auto& e : graph.edges)
        gs << csv::quote(e.src_user) << ',' << csv::quote(e.dst_user) << ',' << e.weight << ',' << e.day << '\n';
    std::ostringstream oc;
    oc << "originator,count\n";
    for (const auto& [u, c] : attribution.counts) oc << csv::quote(u) << ',' << c << '\n';
    const auto buckets = originator_buckets(attribution.counts);
    std::ostringstream bs;
    bs << "bucket,originators,changes\n";
    for (std::size_t i = 0; i < buckets.labels.size(); ++i)
        bs << buckets.labels[i] << ',' << buckets.originators[i] << ',' << buckets.changes[i] << '\n';
    std::ostringstream rc;
    rc << "thread_id,size,pro_ratio\n";
    for (const auto& r : reply_composition(threads, f.reply_min_size))
        rc << csv::quote(r.thread_id) << ',' << r.size << ',' << csv::num(r.pro_ratio) << '\n';
    std::ostringstream ls;
    ls << "thread_id,size,lifespan_days\n";
    for (const auto& l : thread_lifespan(threads, f.lifespan_min_size))
        ls << csv::quote(l.thread_id) << ',' << l.size << ',' << l.lifespan_days << '\n';

    json summary;
    if (!events.empty()) {
        const auto comp = change_tweet_composition(events);
        summary["composition"] = {{"retweet", comp.retweet_fraction},
                                  {"reply", comp.reply_fraction},
                                  {"original", comp.original_fraction},
                                  {"change_tweets", comp.total}};
    }
    summary["attributed"] = attribution.attributed();
    summary["unresolved"] = attribution.unresolved;
    summary["originators"] = attribution.counts.size();
    if (!attribution.counts.empty())
        summary["concentration"] = {{"quantile", f.quantile},
                                    {"originators", concentration(attribution.counts, f.quantile)}};
    json comps = json::array();
    const auto components = graph.components();
    for (std::size_t i = 0; i < components.size() && i < 20; ++i)
        comps.push_back({{"nodes", components[i].nodes.size()},
                         {"edges", components[i].edges},
                         {"roots", components[i].roots},
                         {"negative_edges", components[i].negative_edges}});
    summary["graph"] = {{"nodes", graph.nodes.size()}, {"edges", graph.edges.size()}, {"skipped", graph.skipped},
                        {"largest_components", comps}};

    auto p = common_parameters(o);
    p["reply_min_size"] = f.reply_min_size;
    p["lifespan_min_size"] = f.lifespan_min_size;
    p["attribution"] = f.attribution;
    p["quantile"] = f.quantile;
    if (f.graph_day) p["graph_day"] = *f.graph_day;
    OutputSink sink(o.out, ctx.out);
    sink.write("threads.csv", ts.str(), true);
    sink.write("graph.csv", gs.str());
    sink.write("originators.csv", oc.str());
    sink.write("buckets.csv", bs.str());
    sink.write("reply_composition.csv", rc.str());
    sink.write("lifespan.csv", ls.str());
    sink.write("threads_summary.json", summary.dump(2) + "\n");
    sink.finish("threads", inputs, p);
    return 0;
}

struct SimulateFlags {
    std::string config_path;
    std::vector<std::string> settings;
    std::optional<std::size_t> users;
    std::optional<std::int32_t> days;
    std::string deletion; // "p_anti,p_pro"
};

inline int cmd_simulate(const CommonOptions& o, const SimulateFlags& f, Context& ctx) {
    json inputs = json::array();
    GeneratorConfig cfg;
    if (!f.config_path.empty()) {
        const std::string bytes = read_file(f.config_path);
        inputs.push_back({{"path", f.config_path}, {"checksum", checksum(bytes)}});
        std::istringstream is(bytes);
        cfg = load_generator_config(is);
    }
    cfg.seed = o.seed;
    if (f.users) cfg.n_users = *f.users;
    if (f.days) cfg.day_count = *f.days;
    for (const auto& kv : f.settings) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--set expects key=value");
        apply_config_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    const auto data = generate_stream(cfg, o.threads);

    std::ostringstream rec;
    write_records(rec, data.dataset);
    OutputSink sink(o.out, ctx.out);
    sink.write("records.jsonl", rec.str(), true);
    if (sink.to_directory()) {
        std::ostringstream tu, tt, pm;
        tu << "user_id,true_type\n";
        for (const auto& u : data.truth.users) tu << u.user_id << ',' << to_string(u.type) << '\n';
        tt << "tweet_id,true_stance\n";
        const auto& recs = data.dataset.records();
        for (std::size_t i = 0; i < recs.size(); ++i)
            tt << recs[i].tweet_id << ',' << to_string(data.truth.tweet_stance[i]) << '\n';
        pm << "start_day,end_day,alpha_anti,alpha_pro\n0,-1," << csv::num(data.truth.implied_precision.anti) << ','
           << csv::num(data.truth.implied_precision.pro) << '\n';
        sink.write("truth_users.csv", tu.str());
        sink.write("truth_tweets.csv", tt.str());
        sink.write("precision.csv", pm.str());
        if (!f.deletion.empty()) {
            const auto p = parse_doubles(f.deletion, "--deletion");
            if (p.size() != 2 || p[0] < 0 || p[0] > 1 || p[1] < 0 || p[1] > 1)
                throw UsageError("--deletion expects p_anti,p_pro in [0,1]");
            std::ostringstream kept;
            write_records(kept, selective_deletion(data.dataset, p[0], p[1], cfg.seed));
            sink.write("retained.jsonl", kept.str());
        }
        json summary = {{"records", data.dataset.size()},
                        {"users", cfg.n_users},
                        {"implied_alpha_anti", data.truth.implied_precision.anti},
                        {"implied_alpha_pro", data.truth.implied_precision.pro},
                        {"empirical_alpha_anti", data.truth.empirical_precision.anti},
                        {"empirical_alpha_pro", data.truth.empirical_precision.pro}};
        sink.write("simulate_summary.json", summary.dump(2) + "\n");
    }
    json p = {{"seed", cfg.seed}, {"n_users", cfg.n_users}, {"day_count", cfg.day_count}, {"settings", f.settings}};
    if (!f.deletion.empty()) p["deletion"] = f.deletion;
    sink.finish("simulate", inputs, p);
    return 0;
}

/// Entry point. Returns 0 on success, 1 on data errors, 2 on usage errors.
inline int run(int argc, const char* const* argv, Context ctx) {
    CLI::App app{"stancedyn: stance-change analytics for noisy stance-labeled tweet streams", "stancedyn"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(version));

    CommonOptions o;
    auto add_io = [&](CLI::App* c) {
        c->add_option("--input", o.input, "JSONL records ('-' for stdin)");
        c->add_option("--out", o.out, "Output directory");
        c->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
        c->add_option("--start", o.start, "Dataset start (ISO-8601 UTC); default: first record's day");
        c->add_flag("--strict", o.strict, "Fail on the first malformed record");
        c->add_option("--seed", o.seed, "Random seed");
    };
    auto add_precision = [&](CLI::App* c) {
        c->add_option("--precision", o.precision_path, "Precision model CSV");
        c->add_option("--alpha-anti", o.alpha_anti, "Global anti precision")->check(CLI::Range(0.0, 1.0));
        c->add_option("--alpha-pro", o.alpha_pro, "Global pro precision")->check(CLI::Range(0.0, 1.0));
        c->add_option("--alpha-source", o.alpha_source, "global|period");
    };
    auto add_classify = [&](CLI::App* c) {
        add_precision(c);
        c->add_option("--epsilon", o.epsilon, "Tolerance for the class rule");
        c->add_option("--mode", o.mode, "exact|as-written");
        c->add_option("--min-dual-prob", o.min_dual_prob, "Only users with dual probability >= this");
    };

    auto* ingest = app.add_subcommand("ingest-check", "Validate and summarize a record file");
    add_io(ingest);
    auto* cohort = app.add_subcommand("cohort", "Dual-stance probabilities and effective cohort size");
    add_io(cohort);
    add_precision(cohort);
    auto* classify = app.add_subcommand("classify", "Leaning class per dual-detected user");
    add_io(classify);
    add_classify(classify);
    std::string grid;
    auto* sweep = app.add_subcommand("sweep-eps", "Class counts across tolerances");
    add_io(sweep);
    add_classify(sweep);
    sweep->add_option("--grid", grid, "Comma-separated ascending tolerances");
    std::string after_path;
    auto* migrate = app.add_subcommand("migrate", "Class migration after tweet deletion");
    add_io(migrate);
    add_classify(migrate);
    migrate->add_option("--after", after_path, "Later snapshot JSONL")->required();
    std::optional<std::int32_t> split_day;
    std::string events_path;
    auto* dynamics = app.add_subcommand("dynamics", "Daily stance-change series");
    add_io(dynamics);
    dynamics->add_option("--split-day", split_day, "Also write pre/post windows split at this day");
    dynamics->add_option("--events", events_path, "Event markers CSV `date,label`");
    std::string series_path;
    auto* stationarity = app.add_subcommand("stationarity", "ADF and KPSS tests on the change series");
    add_io(stationarity);
    stationarity->add_option("--series", series_path, "Series CSV instead of --input");
    int max_lag = 20, bins = 16;
    bool raw = false;
    auto* mi = app.add_subcommand("mi", "Mutual information versus lag");
    add_io(mi);
    mi->add_option("--series", series_path, "Series CSV instead of --input");
    mi->add_option("--max-lag", max_lag)->check(CLI::NonNegativeNumber);
    mi->add_option("--bins", bins)->check(CLI::PositiveNumber);
    mi->add_flag("--raw", raw, "Use the series as-is instead of first differences");
    CcmFlags cf;
    auto* ccm = app.add_subcommand("ccm", "Convergent cross mapping between differenced change series");
    add_io(ccm);
    ccm->add_option("--series", cf.series_path, "Series CSV instead of --input");
    ccm->add_option("--e", cf.E, "Embedding dimension")->check(CLI::PositiveNumber);
    ccm->add_option("--tau", cf.tau, "Embedding lag")->check(CLI::PositiveNumber);
    ccm->add_option("--lib-sizes", cf.lib_sizes, "Comma-separated library sizes");
    ccm->add_option("--samples", cf.samples, "Random libraries per size")->check(CLI::PositiveNumber);
    ccm->add_option("--split-day", cf.split_day, "Pre/post split day (boundary day goes to post)");
    ccm->add_option("--exclusion-radius", cf.exclusion_radius, "Temporal exclusion radius");
    ccm->add_option("--e-sweep", cf.e_sweep, "Comma-separated E values to score");
    std::string lexicon, denominator = "dataset";
    auto* topics = app.add_subcommand("topics", "Lexicon topic counts versus expectation");
    add_io(topics);
    add_classify(topics);
    topics->add_option("--lexicon", lexicon, "Lexicon CSV")->required();
    topics->add_option("--denominator", denominator, "dataset|dual");
    ThreadFlags tf;
    auto* threads = app.add_subcommand("threads", "Retweet/reply thread analytics");
    add_io(threads);
    threads->add_option("--reply-min-size", tf.reply_min_size, "Smallest reply thread in the composition table");
    threads->add_option("--lifespan-min-size", tf.lifespan_min_size, "Smallest retweet thread in the lifespan table");
    threads->add_option("--attribution", tf.attribution, "root|parent");
    threads->add_option("--graph-day", tf.graph_day, "Only reply edges on this day");
    threads->add_option("--quantile", tf.quantile, "Share for the concentration measure");
    SimulateFlags sf;
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic labeled stream with ground truth");
    simulate->add_option("--out", o.out, "Output directory (default: records to stdout)");
    simulate->add_option("--seed", o.seed, "Random seed");
    simulate->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
    simulate->add_option("--config", sf.config_path, "key=value config file");
    simulate->add_option("--set", sf.settings, "Override one setting, key=value");
    simulate->add_option("--users", sf.users, "Override n_users");
    simulate->add_option("--days", sf.days, "Override day_count");
    simulate->add_option("--deletion", sf.deletion, "p_anti,p_pro: also write a retained snapshot");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        ctx.out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        ctx.out << version << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        ctx.err << e.what() << '\n';
        return 2;
    }

    try {
        if (*ingest) return cmd_ingest_check(o, ctx);
        if (*cohort) return cmd_cohort(o, ctx);
        if (*classify) return cmd_classify(o, ctx);
        if (*sweep) return cmd_sweep(o, grid, ctx);
        if (*migrate) return cmd_migrate(o, after_path, ctx);
        if (*dynamics) return cmd_dynamics(o, split_day, events_path, ctx);
        if (*stationarity) return cmd_stationarity(o, series_path, ctx);
        if (*mi) return cmd_mi(o, series_path, max_lag, bins, raw, ctx);
        if (*ccm) return cmd_ccm(o, cf, ctx);
        if (*topics) return cmd_topics(o, lexicon, denominator, ctx);
        if (*threads) return cmd_threads(o, tf, ctx);
        if (*simulate) return cmd_simulate(o, sf, ctx);
    } catch (const UsageError& e) {
        ctx.err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        ctx.err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

inline int run(int argc, const char* const* argv) {
    return run(argc, argv, Context{std::cin, std::cout, std::cerr});
}

} // namespace stancedyn::cli
