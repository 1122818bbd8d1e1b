// Acceptance gate: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "stancedyn/cli.hpp"
#include "stancedyn/stancedyn.hpp"
#include "stancedyn/csv.hpp"
#include "stancedyn/stats.hpp"
#include "support.hpp"

using namespace stancedyn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- 1, 2: binomial oracle and closure ----

double choose(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

std::vector<double> direct_pmf(int n, double p) {
    std::vector<double> out(n + 1);
    for (int k = 0; k <= n; ++k) out[k] = choose(n, k) * std::pow(p, k) * std::pow(1 - p, n - k);
    return out;
}

std::vector<double> alpha_grid() {
    std::vector<double> g;
    for (int i = 1; i <= 9; ++i) g.push_back(i / 10.0);
    return g;
}

Outcome criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    std::size_t cases = 0;
    for (int na = 1; na <= 12; ++na)
        for (int np = 1; np <= 12; ++np)
            for (double aa : alpha_grid())
                for (double ap : alpha_grid()) {
                    const auto pa = direct_pmf(na, aa), pp = direct_pmf(np, ap);
                    double pro = 0, anti = 0, bal = 0;
                    for (int i = 0; i <= na; ++i)
                        for (int j = 0; j <= np; ++j) {
                            const double m = pa[i] * pp[j];
                            (j > i ? pro : j < i ? anti : bal) += m;
                        }
                    const auto got = leaning_probabilities(na, np, aa, ap, ProbabilityMode::Exact);
                    worst = std::max({worst, std::abs(got.pr_pro - pro), std::abs(got.pr_anti - anti),
                                      std::abs(got.pr_bal - bal)});
                    ++cases;
                }
    const double secs = seconds_since(t0);
    return {worst <= 1e-12 && secs < 10.0,
            fmt("%zu cases, max abs error %.3g, %.2f s", cases, worst, secs)};
}

Outcome criterion2() {
    double worst_exact = 0.0, worst_gap = 0.0, max_as_written = 0.0;
    std::size_t deficits = 0, cases = 0, bad_deficit = 0;
    for (int na = 1; na <= 12; ++na)
        for (int np = 1; np <= 12; ++np)
            for (double aa : alpha_grid())
                for (double ap : alpha_grid()) {
                    ++cases;
                    const auto ex = leaning_probabilities(na, np, aa, ap, ProbabilityMode::Exact);
                    worst_exact = std::max(worst_exact, std::abs(ex.pr_pro + ex.pr_anti + ex.pr_bal - 1.0));
                    const auto aw = leaning_probabilities(na, np, aa, ap, ProbabilityMode::AsWritten);
                    const double sum = aw.pr_pro + aw.pr_anti + aw.pr_bal;
                    max_as_written = std::max(max_as_written, sum);
                    // mass of outcomes the printed sums leave out, by enumeration
                    const auto pa = direct_pmf(na, aa), pp = direct_pmf(np, ap);
                    double missing = 0.0, zero_mass = 0.0;
                    for (int i = 0; i <= na; ++i)
                        for (int j = 0; j <= np; ++j) {
                            const bool pro = i >= 1 && i <= std::min(na, np - 1) && j >= i + 1 && j <= std::min(na + 1, np);
                            const bool anti = j >= 1 && j <= std::min(np, na - 1) && i >= j + 1 && i <= std::min(np + 1, na);
                            const bool bal = i == j && i >= 1;
                            if (!pro && !anti && !bal) missing += pa[i] * pp[j];
                            if (i == 0 || j == 0) zero_mass += pa[i] * pp[j];
                        }
                    worst_gap = std::max(worst_gap, std::abs(sum + missing - 1.0));
                    if (zero_mass > 0.0) {
                        ++deficits;
                        if (!(missing >= zero_mass * (1 - 1e-12)) || !(missing > 0.0)) ++bad_deficit;
                    }
                }
    const bool pass = worst_exact <= 1e-12 && max_as_written <= 1 + 1e-12 && worst_gap <= 1e-12 && bad_deficit == 0;
    return {pass, fmt("exact closure err %.3g; as-written max sum %.15f, |sum + uncovered - 1| <= %.3g, "
                      "strict deficit in %zu/%zu cases with zero-count mass",
                      worst_exact, max_as_written, worst_gap, deficits - bad_deficit, deficits)};
}

// ---- 3: spot values ----

Outcome criterion3() {
    const double p = dual_probability(1, 1, 0.52, 0.68);
    const auto data = generate_stream(testing_support::small_config(3, 2000));
    const auto users = aggregate_users(data.dataset);
    std::size_t dual = 0;
    for (const auto& [_, u] : users) dual += u.dual_detected();
    const auto est = effective_cohort_size(users, PrecisionModel(AlphaPair{1.0, 1.0}), AlphaSource::Global);
    const bool pass = std::abs(p - 0.3536) <= 1e-12 && est.effective == static_cast<double>(dual) && dual > 0;
    return {pass, fmt("dual_probability(1,1,.52,.68) = %.15f; alpha = 1 gives N_e = %.1f for N = %zu", p, est.effective, dual)};
}

// ---- 4: classification recovery ----

Outcome criterion4() {
    GeneratorConfig cfg;
    cfg.seed = 404;
    cfg.n_users = 100000;
    cfg.type_mix = {0.1, 0.1, 0.3, 0.3, 0.2};
    cfg.emission = {{{0.95, 0.0, 0.05}, {0.0, 0.95, 0.05}, {0.2, 0.75, 0.05}, {0.75, 0.2, 0.05}, {0.475, 0.475, 0.05}}};
    cfg.channel = {{{0.90, 0.06, 0.04}, {0.06, 0.90, 0.04}, {0.10, 0.10, 0.80}}};
    cfg.tweets_exponent = 2.5;
    cfg.tweets_min = 24;
    cfg.tweets_cap = 40;
    cfg.kind_mix = {1, 0, 0};
    cfg.n_originators = 1;
    cfg.sources_per_originator = 1;
    const auto t0 = std::chrono::steady_clock::now();
    const auto data = generate_stream(cfg);
    const double gen_secs = seconds_since(t0);
    const auto t1 = std::chrono::steady_clock::now();
    ClassifyParams params;
    params.precision = PrecisionModel(data.truth.implied_precision);
    params.mode = ProbabilityMode::Exact;
    params.epsilon = 0.05;
    const auto results = classify_users(aggregate_users(data.dataset), params);
    const double cls_secs = seconds_since(t1);
    std::map<std::string, const LeaningResult*> got;
    for (const auto& r : results) got[r.user_id] = &r;
    std::size_t eligible = 0, correct = 0;
    for (const auto& t : data.truth.users) {
        if (t.type != UserType::DualProLean && t.type != UserType::DualAntiLean) continue;
        const auto it = got.find(t.user_id);
        if (it == got.end()) continue;
        const auto& r = *it->second;
        if (r.n_a + r.n_p < 20) continue;
        ++eligible;
        correct += r.cls == (t.type == UserType::DualProLean ? LeaningClass::ProLeaning : LeaningClass::AntiLeaning);
    }
    const double rate = eligible ? static_cast<double>(correct) / static_cast<double>(eligible) : 0.0;
    const double total = gen_secs + cls_secs;
    return {rate >= 0.95 && total < 30.0 && eligible > 10000,
            fmt("alpha = (%.3f, %.3f), %zu/%zu leaning users recovered (%.4f); generate %.1f s + classify %.1f s",
                params.precision.global_pair().anti, params.precision.global_pair().pro, correct, eligible, rate, gen_secs,
                cls_secs)};
}

// ---- 5: epsilon monotonicity ----

Outcome criterion5() {
    std::size_t violations = 0, users = 0;
    std::vector<double> grid;
    for (int i = 0; i < 50; ++i) grid.push_back(i * 0.0099);
    for (std::uint64_t s = 1; s <= 100; ++s) {
        auto cfg = testing_support::small_config(s, 300);
        const auto data = generate_stream(cfg);
        testing_support::RefRng rng(s);
        ClassifyParams params;
        params.precision = PrecisionModel(AlphaPair{0.3 + 0.69 * rng.uniform(), 0.3 + 0.69 * rng.uniform()});
        params.mode = s % 2 ? ProbabilityMode::Exact : ProbabilityMode::AsWritten;
        const auto results = classify_users(aggregate_users(data.dataset), params);
        users += results.size();
        std::set<std::string> prev;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            std::set<std::string> bal;
            for (const auto& r : results)
                if (classify_user(r.probabilities, grid[g]) == LeaningClass::Balanced) bal.insert(r.user_id);
            if (g > 0 && !std::includes(bal.begin(), bal.end(), prev.begin(), prev.end())) ++violations;
            prev = std::move(bal);
        }
    }
    return {violations == 0, fmt("100 datasets, %zu users, 50 tolerances each: %zu violations", users, violations)};
}

// ---- 6: change bookkeeping ----

Outcome criterion6() {
    std::size_t datasets = 0, users = 0, bad_user = 0, bad_aggregate = 0;
    auto check = [&](const Dataset& ds) {
        ++datasets;
        const auto changes = all_user_changes(ds, 1, true);
        StanceChangeSeries s;
        try {
            s = aggregate_series(changes, ds.day_count());
        } catch (const ConsistencyError&) {
            ++bad_aggregate;
            return;
        }
        std::int64_t plus = 0, minus = 0;
        for (const auto& u : changes) {
            ++users;
            plus += u.into_pro;
            minus += u.into_anti;
            // net change equals [ends pro] - [starts pro] over non-neutral tweets
            std::optional<Stance> first, last;
            for (auto i : ds.per_user().at(u.user_id)) {
                const auto st = ds.records()[i].stance;
                if (st == Stance::Neutral) continue;
                if (!first) first = st;
                last = st;
            }
            const std::int64_t net = first ? (last == Stance::Pro) - (first == Stance::Pro) : 0;
            if (std::llabs(u.into_pro - u.into_anti) > 1 || u.into_pro - u.into_anti != net) ++bad_user;
        }
        std::int64_t sp = 0, sm = 0;
        for (auto v : s.delta_plus) sp += v;
        for (auto v : s.delta_minus) sm += v;
        const auto cum = s.cumulative();
        if (sp != plus || sm != minus || (!cum.empty() && cum.back() != plus - minus)) ++bad_aggregate;
    };
    for (std::uint64_t seed = 1; seed <= 50; ++seed) check(generate_stream(testing_support::small_config(seed, 400)).dataset);
    using testing_support::rec;
    check(Dataset::build({}));
    check(Dataset::build({rec("1", "u", 0, Stance::Pro), rec("2", "u", 2, Stance::Anti, TweetKind::Original, {}, {}, 1),
                          rec("3", "u", 2, Stance::Pro, TweetKind::Original, {}, {}, 2), rec("4", "u", 3, Stance::Neutral)}));
    return {bad_user == 0 && bad_aggregate == 0,
            fmt("%zu datasets, %zu users: %zu per-user and %zu aggregate violations", datasets, users, bad_user, bad_aggregate)};
}

// ---- 7: effective cohort calibration ----

Outcome criterion7() {
    GeneratorConfig cfg;
    cfg.n_users = 160000;
    cfg.type_mix = {0, 0, 0, 0, 1};
    cfg.emission[4] = {0.5, 0.5, 0.0};
    cfg.channel = {{{0.80, 0.20, 0.0}, {0.15, 0.85, 0.0}, {0.0, 0.0, 1.0}}};
    cfg.tweets_exponent = 2.0;
    cfg.tweets_min = 2;
    cfg.tweets_cap = 30;
    cfg.kind_mix = {1, 0, 0};
    cfg.n_originators = 1;
    cfg.sources_per_originator = 1;
    double worst = 0.0;
    std::size_t seeds_ok = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        cfg.seed = 7000 + seed;
        const auto data = generate_stream(cfg);
        const auto alpha = data.truth.implied_precision;
        const auto users = aggregate_users(data.dataset);
        std::size_t taken = 0, truly = 0;
        double ne = 0.0;
        for (const auto& t : data.truth.users) { // user_id order
            const auto& u = users.at(t.user_id);
            if (!u.dual_detected()) continue;
            ne += dual_probability(u.n_a, u.n_p, alpha.anti, alpha.pro);
            truly += t.confirmed_dual;
            if (++taken == 100000) break;
        }
        if (taken < 100000) return {false, fmt("seed %llu produced only %zu dual-detected users", (unsigned long long)cfg.seed, taken)};
        const double rel = std::abs(ne - static_cast<double>(truly)) / static_cast<double>(truly);
        worst = std::max(worst, rel);
        seeds_ok += rel <= 0.05;
    }
    return {seeds_ok == 20, fmt("20 seeds x 1e5 dual-detected users: %zu within 5%%, worst relative error %.4f", seeds_ok, worst)};
}

// ---- 8: cross-map direction recovery ----

Outcome criterion8() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto [x, y] = coupled_logistic(1000, 0.4, 0.2, 3.8, 3.5, 0.0, 0.1);
    const auto sizes = default_library_sizes(1000, 3, 1);
    const auto r = skill_curve(x, y, 3, 1, sizes, 50, 8);
    const double diff = r.skill_y_xmap_x.back() - r.skill_x_xmap_y.back();
    std::vector<double> L(sizes.begin(), sizes.end());
    const double rho = stats::spearman(L, r.skill_y_xmap_x);
    const auto verdict = causal_compare(r);
    // null: independent noise, full library, both directions
    std::vector<double> noise_null, logistic_null;
    for (int s = 0; s < 100; ++s) {
        testing_support::RefRng rng(100 + static_cast<std::uint64_t>(s));
        std::vector<double> nx(1000), ny(1000);
        for (auto& v : nx) v = rng.normal();
        for (auto& v : ny) v = rng.normal();
        const auto n = skill_curve(nx, ny, 3, 1, {998}, 1, static_cast<std::uint64_t>(s));
        noise_null.push_back(std::max(std::abs(n.skill_x_xmap_y.back()), std::abs(n.skill_y_xmap_x.back())));
        // uncoupled maps from random starts; y settles on a 4-cycle here
        const auto [lx, ly] = coupled_logistic(1000, 0.05 + 0.9 * rng.uniform(), 0.05 + 0.9 * rng.uniform(), 3.8, 3.5, 0.0, 0.0);
        const auto l = skill_curve(lx, ly, 3, 1, {998}, 1, static_cast<std::uint64_t>(s));
        logistic_null.push_back(std::max(std::abs(l.skill_x_xmap_y.back()), std::abs(l.skill_y_xmap_x.back())));
    }
    const double q95 = stats::quantile(noise_null, 0.95);
    const double q95_logistic = stats::quantile(logistic_null, 0.95);
    const double secs = seconds_since(t0);
    const bool pass = diff >= 0.2 && rho >= 0.8 && q95 <= 0.15 && diff > q95 && diff > q95_logistic && verdict.driven == CausalDirection::YDrivenByX &&
                      secs < 60.0;
    return {pass, fmt("skill(y xmap x) = %.3f, skill(x xmap y) = %.3f, difference %.3f; Spearman rho %.3f; "
                      "null 95th percentile %.3f (noise), %.3f (uncoupled maps); verdict %s; %.1f s",
                      r.skill_y_xmap_x.back(), r.skill_x_xmap_y.back(), diff, rho, q95, q95_logistic,
                      std::string(to_string(verdict.driven)).c_str(), secs)};
}

// ---- 9: stationarity tests ----

Outcome criterion9() {
    std::ifstream in(STANCEDYN_TEST_DATA "/stationarity_reference.csv");
    if (!in) return {false, "reference data missing"};
    std::string line;
    std::getline(in, line);
    std::map<std::string, std::array<int, 4>> tally; // adf reject, kpss reject, adf agree, kpss agree
    std::size_t rows = 0, agree = 0;
    while (std::getline(in, line)) {
        const auto f = csv::split(line);
        const auto x = testing_support::reference_draw(f[0], std::stoull(f[1]));
        const auto adf = adf_test(x);
        const auto kpss = kpss_test(x);
        auto& t = tally[f[0]];
        t[0] += adf.reject_unit_root_at_5pct;
        t[1] += kpss.reject_stationarity_at_5pct;
        const bool a = adf.reject_unit_root_at_5pct == (f[3] == "1");
        const bool k = kpss.reject_stationarity_at_5pct == (f[5] == "1");
        t[2] += a;
        t[3] += k;
        rows += 2;
        agree += a + k;
    }
    const auto& wn = tally["white_noise"];
    const auto& rw = tally["random_walk"];
    const double agreement = static_cast<double>(agree) / static_cast<double>(rows);
    const bool pass = wn[0] >= 90 && 100 - rw[0] >= 90 && 100 - wn[1] >= 90 && rw[1] >= 90 && agreement >= 0.95;
    return {pass, fmt("ADF rejects white noise %d/100, keeps random walk %d/100; KPSS keeps white noise %d/100, "
                      "rejects random walk %d/100; decision agreement with statsmodels %.3f",
                      wn[0], 100 - rw[0], 100 - wn[1], rw[1], agreement)};
}

// ---- 10: mutual information ----

Outcome criterion10() {
    testing_support::RefRng rng(10);
    std::vector<double> x(10000), y(10000), shifted(10000);
    for (auto& v : x) v = rng.uniform();
    for (auto& v : y) v = rng.uniform();
    for (std::size_t t = 0; t < x.size(); ++t) shifted[t] = t >= 3 ? x[t - 3] : rng.uniform();
    const auto same = mutual_information_lag(x, x, 20);
    const auto lagged = mutual_information_lag(x, shifted, 20);
    const auto indep = mutual_information_lag(x, y, 20);
    double worst = 0.0;
    for (const auto& p : indep.points) worst = std::max(worst, p.mi_nats);
    return {same.argmax == 0 && lagged.argmax == 3 && worst <= 0.02,
            fmt("identical argmax %d; shifted-by-3 argmax %d; independent max MI %.4f nats", same.argmax, lagged.argmax, worst)};
}

// ---- 11: topic accounting ----

Outcome criterion11() {
    auto cfg = testing_support::small_config(11, 60000);
    cfg.day_count = 200;
    cfg.text_rate = 0.7;
    cfg.anti_phrases = {"vaccine mandate", "bill gates"};
    cfg.pro_phrases = {"get vaccinated", "debunked"};
    const auto data = generate_stream(cfg);
    std::istringstream lin("topic,stance,veracity,phrase\n"
                           "vaccine mandate,anti,genuine,vaccine mandate\n"
                           "bill gates,anti,falsehood,bill gates\n"
                           "pro-vax general,pro,none,get vaccinated\n"
                           "debunking anti-vax,pro,none,debunked\n");
    const auto lex = load_lexicon(lin);
    std::size_t non_neutral = 0;
    for (const auto& r : data.dataset.records()) non_neutral += r.stance != Stance::Neutral;

    // partition conservation over leaning classes plus the rest
    ClassifyParams params;
    params.precision = PrecisionModel(data.truth.implied_precision);
    std::map<std::string, std::string> groups;
    for (const auto& [id, _] : data.dataset.per_user()) groups[id] = "non-dual";
    for (const auto& r : classify_users(aggregate_users(data.dataset), params)) groups[r.user_id] = std::string(to_string(r.cls));
    const auto rep = topic_report(data.dataset, lex, groups, Denominator::Dataset);
    std::map<std::pair<std::string, Stance>, double> exp_sum, obs_sum;
    for (const auto& r : rep.rows) {
        exp_sum[{r.topic, r.stance}] += r.expected;
        obs_sum[{r.topic, r.stance}] += static_cast<double>(r.observed);
    }
    double worst_conservation = 0.0;
    for (const auto& [k, e] : exp_sum) worst_conservation = std::max(worst_conservation, std::abs(e - obs_sum[k]));

    // uniform tagging: a group holding ~30% of tweets
    std::map<std::string, std::string> split;
    for (const auto& [id, _] : data.dataset.per_user()) split[id] = fnv1a(id) % 10 < 3 ? "g30" : "g70";
    const auto urep = topic_report(data.dataset, lex, split, Denominator::Dataset);
    double worst_ratio = 0.0;
    for (const auto& r : urep.rows) worst_ratio = std::max(worst_ratio, std::abs(static_cast<double>(r.observed) / r.expected - 1.0));
    return {worst_conservation <= 1e-9 && worst_ratio <= 0.03 && non_neutral >= 100000,
            fmt("%zu non-neutral tweets; conservation error %.3g; uniform tagging max |observed/expected - 1| = %.4f "
                "(g30 anti share %.3f)",
                non_neutral, worst_conservation, worst_ratio, urep.anti_share.at("g30"))};
}

// ---- 12: thread concentration ----

Outcome criterion12() {
    auto cfg = testing_support::small_config(12, 60000);
    cfg.tweets_min = 4;
    cfg.tweets_cap = 200;
    cfg.kind_mix = {0.1, 0.45, 0.45};
    cfg.n_originators = 10000;
    cfg.originator_exponent = 1.8;
    cfg.sources_per_originator = 1;
    cfg.day_count = 365;
    const auto data = generate_stream(cfg);
    const auto& ds = data.dataset;
    const auto events = flatten_events(all_user_changes(ds));
    const auto attr = attribute_changes(events, ds);

    // brute-force prefix scan
    std::vector<std::pair<std::int64_t, std::string>> order;
    std::int64_t total = 0;
    for (const auto& [u, c] : attr.counts) {
        order.push_back({-c, u});
        total += c;
    }
    std::sort(order.begin(), order.end());
    std::size_t brute = 0;
    for (std::int64_t cum = 0; 2 * cum < total; ++brute) cum += -order[brute].first;
    const auto conc = concentration(attr.counts, 0.5);

    const auto buckets = originator_buckets(attr.counts);
    std::int64_t bucket_orig = 0, bucket_changes = 0;
    for (std::size_t i = 0; i < 5; ++i) {
        bucket_orig += buckets.originators[i];
        bucket_changes += buckets.changes[i];
    }
    const bool conserved = bucket_orig == static_cast<std::int64_t>(attr.counts.size()) && bucket_changes == attr.attributed();

    const auto graph = build_signed_reply_graph(events, ds);
    std::mt19937_64 rng(12);
    std::size_t checked = 0, mismatches = 0;
    if (!graph.edges.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, graph.edges.size() - 1);
        for (; checked < 10000; ++checked) {
            const auto& e = graph.edges[pick(rng)];
            const auto* reply = ds.find(e.reply_tweet_id);
            const auto* parent = ds.find(e.parent_tweet_id);
            if (!reply || !parent || parent->user_id != e.src_user || reply->user_id != e.dst_user ||
                e.weight != (reply->stance == parent->stance ? 1 : -1))
                ++mismatches;
        }
    }
    const bool pass = conc == brute && conserved && graph.edges.size() >= 10000 && mismatches == 0;
    return {pass, fmt("concentration(0.5) = %zu, prefix scan %zu over %zu originators; buckets %s; "
                      "%zu of %zu edges checked, %zu mismatches",
                      conc, brute, attr.counts.size(), conserved ? "conserve" : "do not conserve", checked,
                      graph.edges.size(), mismatches)};
}

// ---- 13: end-to-end determinism ----

std::map<std::string, std::string> checksums(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        out[fs::relative(e.path(), dir).string()] = cli::checksum(os.str());
    }
    return out;
}

bool pipeline(const fs::path& dir, int threads) {
    const std::string cli = STANCEDYN_CLI;
    const std::string t = " --threads " + std::to_string(threads);
    const std::string d = dir.string();
    const std::string lex = STANCEDYN_TEST_DATA "/../../data/demo_lexicon.csv";
    const std::string sim = d + "/sim";
    const std::string in = " --input " + sim + "/records.jsonl";
    const std::string prec = " --precision " + sim + "/precision.csv";
    const std::vector<std::string> cmds = {
        cli + " simulate --seed 7 --users 3000 --deletion 0.3,0.1 --set text_rate=0.6"
              " --set 'anti_phrases=vaccine mandate|side effects|bill gates|natural immunity'"
              " --set 'pro_phrases=get vaccinated|misinformation|side effects|clinical trial'" + t + " --out " + sim,
        cli + " simulate --seed 7 --users 3000" + t + " | " + cli + " classify --input - --alpha-anti 0.85 --alpha-pro 0.9" + t +
            " > " + d + "/piped_classify.csv",
        cli + " simulate --seed 7 --users 3000" + t + " | " + cli + " dynamics" + t + " > " + d + "/piped_series.csv",
        cli + " ingest-check" + in + t + " --out " + d + "/ingest",
        cli + " cohort" + in + prec + t + " --out " + d + "/cohort",
        cli + " classify" + in + prec + " --mode exact" + t + " --out " + d + "/classify_exact",
        cli + " classify" + in + prec + " --mode as-written" + t + " --out " + d + "/classify_as_written",
        cli + " sweep-eps" + in + prec + " --mode exact" + t + " --out " + d + "/sweep",
        cli + " migrate" + in + " --after " + sim + "/retained.jsonl" + prec + " --mode exact" + t + " --out " + d + "/migrate",
        cli + " dynamics" + in + " --split-day 180" + t + " --out " + d + "/dynamics",
        cli + " stationarity --series " + d + "/dynamics/series.csv" + t + " --out " + d + "/stationarity",
        cli + " mi --series " + d + "/dynamics/series.csv --max-lag 30" + t + " --out " + d + "/mi",
        cli + " ccm --series " + d + "/dynamics/series.csv --seed 7" + t + " --out " + d + "/ccm",
        cli + " ccm --series " + d + "/dynamics/series.csv --seed 7 --e 3 --tau 1 --split-day 180" + t + " --out " + d + "/ccm_split",
        cli + " topics" + in + prec + " --lexicon " + lex + " --denominator dataset" + t + " --out " + d + "/topics",
        cli + " topics" + in + prec + " --lexicon " + lex + " --denominator dual" + t + " --out " + d + "/topics_dual",
        cli + " threads" + in + " --reply-min-size 5 --lifespan-min-size 20" + t + " --out " + d + "/threads",
    };
    for (const auto& c : cmds)
        if (std::system((c + " 2>/dev/null").c_str()) != 0) {
            std::cerr << "pipeline step failed: " << c << '\n';
            return false;
        }
    return true;
}

Outcome criterion13() {
    const auto root = fs::temp_directory_path() / "stancedyn_acceptance_e2e";
    std::vector<std::map<std::string, std::string>> runs;
    for (int threads : {1, 1, 4}) {
        fs::remove_all(root);
        fs::create_directories(root);
        if (!pipeline(root, threads)) return {false, "a pipeline step exited non-zero"};
        runs.push_back(checksums(root));
    }
    fs::remove_all(root);
    const bool same = runs[0] == runs[1] && runs[1] == runs[2];
    std::size_t differing = 0;
    for (const auto& [k, v] : runs[0]) differing += runs[2].count(k) == 0 || runs[2].at(k) != v || runs[1].at(k) != v;
    return {same && runs[0].size() > 40,
            fmt("%zu output files across 17 pipeline steps; runs with --threads 1, 1, 4: %zu differing", runs[0].size(), differing)};
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2,  criterion3,  criterion4, criterion5,
                                                            criterion6, criterion7,  criterion8,  criterion9, criterion10,
                                                            criterion11, criterion12, criterion13};
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int n = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(n)) continue;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << " (" << o.detail << "; "
                  << fmt("%.1f s", seconds_since(t0)) << ")" << std::endl;
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
