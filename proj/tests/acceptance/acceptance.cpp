// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fogsense/apps/bus.hpp"
#include "fogsense/cql/executor.hpp"
#include "fogsense/cql/parser.hpp"
#include "fogsense/scenario/simulation.hpp"
#include "fogsense/scenario/trace_io.hpp"
#include "fogsense/sim/rng.hpp"
#include "harness.hpp"
#include "oracles.hpp"

namespace {

using namespace fogsense;
using namespace fogsense::testing;
using Clock = std::chrono::steady_clock;

// Collects problems for one criterion; the first few are printed.
struct Outcome {
    std::vector<std::string> problems;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) problems.push_back(what);
    }
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int prec = 2) {
    std::ostringstream ss;
    ss.precision(prec);
    ss << std::fixed << v;
    return ss.str();
}

template <class T>
std::vector<const T*> apps_of(const scenario::Scenario& s) {
    std::vector<const T*> out;
    for (const auto& a : s.apps) {
        if (const auto* x = std::get_if<T>(&a)) out.push_back(x);
    }
    return out;
}

// ---- 1 ------------------------------------------------------------------

Outcome determinism() {
    Outcome o;
    const auto dir = std::filesystem::temp_directory_path() / "fogsense_acceptance";
    std::filesystem::create_directories(dir);
    const auto names = bundled_scenarios();
    const std::vector<std::uint64_t> seeds{1, 2, 3};
    auto write = [](const std::filesystem::path& p, const Trace& t) {
        std::ofstream out(p, std::ios::binary);
        scenario::write_trace(out, t);
    };
    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    std::size_t pairs = 0;
    std::set<std::string> per_scenario_first;
    const auto t0 = Clock::now();
    for (const auto& n : names) {
        for (auto seed : seeds) {
            scenario::Overrides ov;
            ov.seed = seed;
            const auto a = dir / (n + "_" + std::to_string(seed) + "_a.jsonl");
            const auto b = dir / (n + "_" + std::to_string(seed) + "_b.jsonl");
            write(a, run_file(scenario_path(n), ov));
            write(b, run_file(scenario_path(n), ov));
            const auto ta = slurp(a);
            o.require(!ta.empty(), n + " seed " + std::to_string(seed) + ": empty trace");
            o.require(ta == slurp(b), n + " seed " + std::to_string(seed) + ": traces differ");
            ++pairs;
        }
    }
    const double secs = seconds_since(t0);
    std::filesystem::remove_all(dir);
    o.require(names.size() >= 10, "fewer than 10 bundled scenarios");
    o.require(secs < 10.0, "took " + fmt(secs) + " s");
    o.detail = std::to_string(names.size()) + " scenarios x 3 seeds, " + std::to_string(pairs) +
               " pairs byte-identical, " + fmt(secs) + " s for " + std::to_string(2 * pairs) + " runs";
    return o;
}

// ---- 2 ------------------------------------------------------------------

Outcome family_safety() {
    Outcome o;
    const auto sc = scenario::load_scenario_file(scenario_path("family_safety"));
    if (!sc.ok()) {
        o.require(false, "scenario does not load");
        return o;
    }
    const auto& s = *sc.scenario;
    const auto fogs = s.ids(sim::Role::Fog);
    const auto sensors = s.ids(sim::Role::Sensor);
    o.require(fogs.size() == 3, "expected 3 fogs");
    o.require(sensors.size() == 8, "expected 8 sensors");

    // Relayed sensors have no link to any fog.
    std::set<std::string> fog_set(fogs.begin(), fogs.end());
    std::set<std::string> fog_linked;
    for (const auto& l : s.links) {
        if (fog_set.contains(l.a)) fog_linked.insert(l.b);
        if (fog_set.contains(l.b)) fog_linked.insert(l.a);
    }
    std::size_t relayed = 0;
    for (const auto& id : sensors) relayed += fog_linked.contains(id) ? 0 : 1;
    o.require(relayed == 2, "expected 2 relayed sensors, found " + std::to_string(relayed));

    // One fog loses every backbone link for the same 60 s.
    bool partition = false;
    for (const auto& f : fogs) {
        std::optional<std::pair<sim::Millis, sim::Millis>> common;
        bool all = true;
        for (const auto& l : s.links) {
            if (!(fog_set.contains(l.a) && fog_set.contains(l.b)) || (l.a != f && l.b != f)) continue;
            if (l.up.size() < 2) {
                all = false;
                break;
            }
            const std::pair<sim::Millis, sim::Millis> gap{l.up[0].second, l.up[1].first};
            if (!common) {
                common = gap;
            } else {
                common = std::pair{std::max(common->first, gap.first), std::min(common->second, gap.second)};
            }
        }
        if (all && common && common->second - common->first >= 60000) partition = true;
    }
    o.require(partition, "no 60 s partition of a fog");

    const auto trace = scenario::run_scenario(s);
    const auto fs_app = apps_of<scenario::FamilySafetyApp>(s);
    if (fs_app.size() != 1) {
        o.require(false, "expected one family_safety app");
        return o;
    }
    std::map<std::string, std::string> phone_of;
    std::map<std::string, std::set<std::string>> family_of;
    for (const auto& m : fs_app[0]->sensors) {
        phone_of[m.sensor] = m.phone;
        family_of[m.sensor] = m.family;
    }

    // A phone counts as confirmed when its user confirmed and the phone published its number on OK.
    std::set<std::string> confirmed_sensors;
    for (const auto* r : select(trace, "USER_CONFIRM")) confirmed_sensors.insert(r->node);
    std::set<std::string> confirmed;
    std::map<std::string, std::size_t> ok_publishes;
    for (const auto* r : select(trace, "PUBLISH", [](const TraceRecord& r) { return r.str("topic") == "OK"; })) {
        ++ok_publishes[r->str("payload")];
        if (confirmed_sensors.contains(r->node) && phone_of[r->node] == r->str("payload")) confirmed.insert(r->str("payload"));
    }
    o.require(confirmed.size() >= 5, "too few confirmations to be meaningful");

    std::map<std::pair<std::string, std::string>, int> displays;
    for (const auto* r : select(trace, "DISPLAY", [](const TraceRecord& r) { return r.str("what") == "SAFE"; })) {
        ++displays[{r->node, r->str("phone")}];
    }
    std::size_t expected_displays = 0;
    for (const auto& [sensor, family] : family_of) {
        for (const auto& f : family) {
            const int n = displays.contains({sensor, f}) ? displays[{sensor, f}] : 0;
            if (confirmed.contains(f)) {
                ++expected_displays;
                o.require(n == 1, sensor + " shows " + f + " " + std::to_string(n) + " times");
            } else {
                o.require(n == 0, sensor + " shows unconfirmed " + f);
            }
        }
    }
    for (const auto& [key, n] : displays) {
        o.require(family_of[key.first].contains(key.second), key.first + " shows non-family " + key.second);
    }
    for (const auto& [phone, n] : ok_publishes) {
        o.require(n <= 1 + fogs.size(), "publish(OK, " + phone + ") x" + std::to_string(n));
    }

    // SafeList monotone: each phone added once per fog and sizes grow by one.
    std::map<std::string, std::int64_t> size_at;
    std::set<std::pair<std::string, std::string>> added;
    for (const auto* r : select(trace, "SAFE_ADD")) {
        o.require(added.emplace(r->node, r->str("phone")).second, r->node + " re-added " + r->str("phone"));
        o.require(r->integer("size") == ++size_at[r->node], r->node + " SafeList size jumped");
    }
    // After the heal every confirmed number is known at every fog.
    for (const auto& p : confirmed) {
        for (const auto& f : fogs) o.require(added.contains({f, p}), p + " never reached " + f);
    }
    o.detail = std::to_string(confirmed.size()) + " confirmed phones, " + std::to_string(expected_displays) +
               " DISPLAY-SAFE each exactly once, max OK publishes per phone " +
               std::to_string(ok_publishes.empty() ? 0 : std::max_element(ok_publishes.begin(), ok_publishes.end(),
                                                                         [](auto& a, auto& b) { return a.second < b.second; })
                                                             ->second) +
               " <= " + std::to_string(1 + fogs.size());
    return o;
}

// ---- 3 ------------------------------------------------------------------

Outcome at_most_once() {
    Outcome o;
    const auto trace = run_file(scenario_path("dual_path"));
    std::map<std::pair<std::string, std::string>, int> handled;
    for (const auto* r : select(trace, "DELIVER")) ++handled[{r->node, r->str("msg")}];
    for (const auto& [k, n] : handled) o.require(n <= 1, k.first + " handled " + k.second + " " + std::to_string(n) + "x");
    std::set<std::pair<std::string, std::string>> distinct;
    for (const auto* r : select(trace, "MSG_RECV")) distinct.emplace(r->node, r->str("msg"));
    const auto recv = count(trace, "MSG_RECV");
    const auto dup = count(trace, "DUP");
    o.require(dup == recv - distinct.size(), "DUP " + std::to_string(dup) + " != " + std::to_string(recv - distinct.size()));
    o.require(dup > 0, "no duplicate arrivals; dual paths not exercised");
    o.detail = std::to_string(handled.size()) + " (node, msg) deliveries, DUP " + std::to_string(dup) + " = " +
               std::to_string(recv) + " receives - " + std::to_string(distinct.size()) + " distinct";
    return o;
}

// ---- 4 ------------------------------------------------------------------

Outcome delay_tolerance() {
    Outcome o;
    const auto sc = scenario::load_scenario_file(scenario_path("delay_tolerance"));
    if (!sc.ok()) {
        o.require(false, "scenario does not load");
        return o;
    }
    const auto& s = *sc.scenario;
    const auto fogs = s.ids(sim::Role::Fog);
    std::set<std::string> fog_set(fogs.begin(), fogs.end());
    sim::Millis heal = 0;
    sim::Millis max_latency = 0;
    for (const auto& l : s.links) {
        if (!fog_set.contains(l.a) || !fog_set.contains(l.b)) continue;
        o.require(!l.up.empty() && l.up[0].first >= 120000, "fog link " + l.a + "-" + l.b + " up before 120 s");
        if (!l.up.empty()) heal = std::max(heal, l.up[0].first);
        max_latency = std::max(max_latency, l.latency);
    }
    std::map<std::string, std::set<std::string>> subscribers;
    for (const auto* a : apps_of<scenario::SubscribeApp>(s)) {
        if (fog_set.contains(a->node)) subscribers[a->topic].insert(a->node);
    }
    const auto bound = heal + s.params.anti_entropy_interval + max_latency;

    const auto trace = scenario::run_scenario(s);
    std::map<std::pair<std::string, std::string>, std::int64_t> delivered_at;
    for (const auto* r : select(trace, "DELIVER")) delivered_at.emplace(std::pair{r->node, r->str("msg")}, r->time.ms());
    std::size_t messages = 0;
    std::size_t processed = 0;
    std::int64_t latest = 0;
    for (const auto* r : select(trace, "PUBLISH", [&](const TraceRecord& r) { return r.time.ms() < heal; })) {
        ++messages;
        for (const auto& f : subscribers[r->str("topic")]) {
            auto it = delivered_at.find({f, r->str("msg")});
            if (it == delivered_at.end()) {
                o.require(false, r->str("msg") + " never processed at " + f);
                continue;
            }
            o.require(it->second <= bound, r->str("msg") + " at " + f + " only at " + std::to_string(it->second));
            latest = std::max(latest, it->second);
            ++processed;
        }
    }
    o.require(messages > 0, "nothing published during the outage");
    o.detail = std::to_string(messages) + " outage messages, " + std::to_string(processed) +
               " (msg, fog) deliveries, last at " + std::to_string(latest) + " ms <= " + std::to_string(bound);
    return o;
}

// ---- 5 ------------------------------------------------------------------

Outcome query_all() {
    Outcome o;
    std::vector<std::string> parts;
    for (int k : {1, 5, 20}) {
        auto d = scenario_doc("reach-" + std::to_string(k), 40000);
        d["params"]["deadline_ms"] = 10000;
        d["nodes"].push_back(fog("F"));
        for (int i = 0; i < k; ++i) {
            const auto id = "s" + std::to_string(i);
            d["nodes"].push_back(sensor(id, i, 0));
            d["links"].push_back(link("F", id, 5 + i % 7));
        }
        d["apps"].push_back(Json{{"type", "general_query"}, {"fog", "F"}, {"required", "UNBOUNDED"}, {"at", 1000}});
        const auto trace = run_doc(d);
        const auto closed = select(trace, "QUERY_CLOSED");
        if (closed.size() != 1) {
            o.require(false, "k=" + std::to_string(k) + ": " + std::to_string(closed.size()) + " closes");
            continue;
        }
        std::set<std::string> who;
        for (const auto* r : select(trace, "ANSWER")) {
            if (r->time < closed[0]->time) who.insert(r->str("sensor"));
        }
        o.require(static_cast<int>(who.size()) == k, "k=" + std::to_string(k) + ": " + std::to_string(who.size()) + " answers");
        o.require(closed[0]->integer("answers") == k, "k=" + std::to_string(k) + ": close reports wrong count");
        parts.push_back(std::to_string(who.size()) + "/" + std::to_string(k));
    }

    const auto trace = run_file(scenario_path("general_query_required"));
    std::map<std::string, const TraceRecord*> closed;
    for (const auto* r : select(trace, "QUERY_CLOSED")) closed[r->node] = r;
    std::map<std::string, std::size_t> direct;
    for (const auto* r : select(trace, "GENERAL_QUERY")) direct[r->node] = static_cast<std::size_t>(r->integer("sent"));
    const auto* b = closed.contains("f1") ? closed["f1"] : nullptr;
    const auto* c = closed.contains("f2") ? closed["f2"] : nullptr;
    o.require(direct["f1"] == 10, "(b) needs 10 sensors");
    o.require(b && b->integer("answers") == 3 && b->str("required") == "3" && !b->flag("partial") && !b->flag("deadline"),
              "(b) did not close with exactly 3");
    o.require(direct["f2"] == 1, "(c) needs 1 sensor");
    o.require(c && c->integer("answers") == 1 && c->flag("partial") && c->flag("deadline"),
              "(c) did not close partial at the deadline");
    o.detail = "(a) UNBOUNDED " + (parts.empty() ? std::string("-") : parts[0]);
    for (std::size_t i = 1; i < parts.size(); ++i) o.detail += ", " + parts[i];
    o.detail += "; (b) 3 of 10; (c) 1 of 3 partial at deadline";
    return o;
}

// ---- 6 ------------------------------------------------------------------

Outcome soft_state() {
    Outcome o;
    struct Case {
        std::string name;
        sim::Millis cut = 0;
        std::optional<sim::Millis> back;
        Trace trace;
    };
    std::vector<Case> cases;
    for (const auto* n : {"soft_state_expiry", "soft_state_near_miss"}) {
        const auto sc = scenario::load_scenario_file(scenario_path(n));
        if (!sc.ok()) {
            o.require(false, std::string(n) + " does not load");
            return o;
        }
        const auto& s = *sc.scenario;
        o.require(s.params.lease_period == 5000 && s.params.expiry_threshold == 3, std::string(n) + ": lease params");
        Case c{n, 0, std::nullopt, scenario::run_scenario(s)};
        for (const auto& l : s.links) {
            if (l.up.empty()) continue;
            c.cut = l.up[0].second;
            if (l.up.size() > 1) c.back = l.up[1].first;
        }
        cases.push_back(std::move(c));
    }
    const auto& expiry = cases[0];
    const auto& near = cases[1];
    const auto limit = expiry.cut + 20000;
    const auto samples = select(expiry.trace, "SAMPLE");
    const auto late = std::count_if(samples.begin(), samples.end(), [&](const auto* r) { return r->time.ms() > limit; });
    o.require(late == 0, std::to_string(late) + " samples after t + 20000");
    o.require(count(expiry.trace, "QUERY_EXPIRED") == 1, "query did not expire");
    o.require(count(expiry.trace, "SAMPLING_STOP") == 1, "sampling did not stop");
    const auto last = samples.empty() ? 0 : samples.back()->time.ms();

    o.require(near.cut == expiry.cut && near.back && *near.back == near.cut + 14000, "near-miss reconnect is not at t + 14000");
    o.require(count(near.trace, "QUERY_EXPIRED") == 0, "near-miss query expired");
    const auto ns = select(near.trace, "SAMPLE");
    const auto alive = std::count_if(ns.begin(), ns.end(), [&](const auto* r) { return r->time.ms() > limit; });
    o.require(alive > 0, "near-miss query stopped sampling");
    o.detail = "cut at t=" + std::to_string(expiry.cut) + ", last sample " + std::to_string(last) + " <= " +
               std::to_string(limit) + "; near-miss back at t+14000 keeps sampling (" + std::to_string(alive) +
               " samples after t+20000)";
    return o;
}

// ---- 7 ------------------------------------------------------------------

cql::QueryAst random_ast(sim::Rng& rng, bool integral) {
    cql::QueryAst a;
    a.aggregate = static_cast<cql::Aggregate>(rng.below(6));
    if (!integral && a.aggregate == cql::Aggregate::Sum && rng.below(2) == 0) a.aggregate = cql::Aggregate::Avg;
    a.field = a.aggregate == cql::Aggregate::Count && rng.below(3) == 0 ? "*" : "x";
    a.stream = "s";
    const auto preds = rng.below(3);
    for (std::uint64_t i = 0; i < preds; ++i) {
        cql::Comparison c;
        c.op = static_cast<cql::Comparator>(rng.below(6));
        if (rng.below(3) == 0) {
            c.field = "tag";
            c.literal = std::string(1, static_cast<char>('a' + rng.below(4)));
        } else {
            c.field = "x";
            c.literal = static_cast<double>(rng.between(-50, 50));
        }
        a.where.push_back(c);
    }
    return a;
}

Outcome cql_oracle() {
    Outcome o;
    sim::Rng rng(20240607);
    const auto t0 = Clock::now();
    std::size_t pairs = 0;
    std::size_t emissions = 0;
    std::size_t biggest = 0;
    double worst_avg = 0;
    for (int i = 0; i < 1200; ++i) {
        const bool integral = rng.below(2) == 0;
        auto ast = random_ast(rng, integral);
        const std::size_t n = i % 20 == 0 ? static_cast<std::size_t>(rng.between(5000, 10000))
                                          : static_cast<std::size_t>(rng.between(0, 1500));
        std::vector<cql::Sample> log;
        log.reserve(n);
        std::int64_t t = rng.between(0, 50);
        for (std::size_t k = 0; k < n; ++k) {
            t += rng.between(0, 25);
            cql::Sample s{rng.below(20) == 0 ? "other" : "s", sim::SimTime{t}, {}};
            const auto roll = rng.below(40);
            if (roll == 0) {
                s.fields["x"] = std::string("n/a");  // wrong type
            } else if (roll != 1) {               // roll 1: field missing
                s.fields["x"] = integral ? static_cast<double>(rng.between(-100, 100)) : rng.uniform(-100, 100);
            }
            s.fields["tag"] = std::string(1, static_cast<char>('a' + rng.below(4)));
            log.push_back(std::move(s));
        }
        const std::int64_t installed = rng.between(0, 40);
        const std::int64_t end = t + rng.between(0, 500);
        if (rng.below(2) == 0) {
            ast.window = cql::WindowKind::Time;
            ast.size = rng.between(1, 3000);
            // Keep the brute force's per-tick rescans affordable.
            const std::int64_t min_every = std::max<std::int64_t>(1, (end - installed) / 300);
            ast.every = rng.below(3) == 0 ? ast.size : rng.between(min_every, std::max(min_every, 4000L));
        } else {
            ast.window = cql::WindowKind::Count;
            ast.size = rng.between(1, 150);
            ast.every = rng.below(3) == 0 ? ast.size : rng.between(1, 200);
        }
        const auto want = oracle::brute_force(ast, log, installed, end);
        const auto got = oracle::incremental(ast, log, installed, end);
        ++pairs;
        biggest = std::max(biggest, n);
        emissions += want.size();
        const auto text = cql::format(ast);
        if (got.size() != want.size()) {
            o.require(false, text + ": " + std::to_string(got.size()) + " vs " + std::to_string(want.size()) + " emissions");
            continue;
        }
        for (std::size_t k = 0; k < got.size(); ++k) {
            bool same = got[k].time == want[k].time && got[k].window_count == want[k].window_count &&
                        got[k].value.index() == want[k].value.index();
            if (same && ast.aggregate == cql::Aggregate::Avg && !integral) {
                const double a = std::get<double>(got[k].value);
                const double b = std::get<double>(want[k].value);
                const double rel = std::fabs(a - b) / std::max(std::fabs(b), 1e-300);
                worst_avg = std::max(worst_avg, a == b ? 0.0 : rel);
                same = a == b || rel <= 1e-9;
            } else if (same) {
                same = got[k].value == want[k].value;
            }
            if (!same) {
                o.require(false, text + ": emission " + std::to_string(k) + " differs");
                break;
            }
        }
    }
    const double secs = seconds_since(t0);
    o.require(pairs >= 1000, "too few pairs");
    o.require(secs < 60.0, "took " + fmt(secs) + " s");
    o.detail = std::to_string(pairs) + " (AST, stream) pairs, largest stream " + std::to_string(biggest) + ", " +
               std::to_string(emissions) + " emissions compared, worst AVG rel err " + fmt(worst_avg, 3) + ", " +
               fmt(secs) + " s";
    return o;
}

// ---- 8 ------------------------------------------------------------------

Outcome density() {
    Outcome o;
    const auto example = run_file(scenario_path("density_map"));
    const auto maps = select(example, "DENSITY_MAP");
    o.require(!maps.empty() && maps[0]->str("map") == "0,0:2;2,2:1", "worked example does not reproduce");

    sim::Rng rng(808);
    std::size_t checked = 0;
    std::size_t responders_total = 0;
    for (int round = 0; round < 50; ++round) {
        const int n = static_cast<int>(rng.between(1, 20));
        const double size = std::round(rng.uniform(1, 150));
        auto d = scenario_doc("density-" + std::to_string(round), 16000, static_cast<std::uint64_t>(round) + 1);
        d["params"]["sector_size"] = size;
        d["params"]["deadline_ms"] = 10000;
        d["params"]["hop_ttl"] = 20;
        d["params"]["fanout"] = 20;
        d["params"]["max_relay_hops"] = 20;
        d["nodes"].push_back(fog("F"));
        std::map<std::string, std::pair<double, double>> placed;
        for (int i = 0; i < n; ++i) {
            const auto id = "s" + std::to_string(i);
            const double x = std::round(rng.uniform(-400, 400) * 10) / 10;
            const double y = std::round(rng.uniform(-400, 400) * 10) / 10;
            placed[id] = {x, y};
            d["nodes"].push_back(sensor(id, x, y));
            // Some sensors hang off an earlier one and are reached by gossip.
            if (i == 0 || rng.below(3) != 0) {
                d["links"].push_back(link("F", id, rng.between(1, 20)));
            } else {
                d["links"].push_back(link("s" + std::to_string(rng.below(static_cast<std::uint64_t>(i))), id, rng.between(1, 20)));
            }
        }
        d["apps"].push_back(Json{{"type", "density_map"}, {"fog", "F"}, {"at", {2000}}});
        const auto trace = run_doc(d);
        const auto m = select(trace, "DENSITY_MAP");
        if (m.size() != 1) {
            o.require(false, "round " + std::to_string(round) + ": no map");
            continue;
        }
        const auto query = m[0]->str("query");
        std::set<std::string> who;
        std::vector<std::pair<double, double>> pts;
        for (const auto* r : select(trace, "ANSWER", [&](const TraceRecord& r) { return r.str("query") == query; })) {
            if (!who.insert(r->str("sensor")).second) continue;
            const auto p = nlohmann::json::parse(r->str("payload"));
            pts.emplace_back(p["x"].get<double>(), p["y"].get<double>());
            o.require(placed[r->str("sensor")] == pts.back(), "round " + std::to_string(round) + ": logged position wrong");
        }
        o.require(m[0]->integer("total") == static_cast<std::int64_t>(who.size()),
                  "round " + std::to_string(round) + ": sum of counts != responders");
        std::string expect;
        for (const auto& [sec, c] : oracle::bucket(pts, size)) {
            if (!expect.empty()) expect += ';';
            expect += std::to_string(sec.first) + "," + std::to_string(sec.second) + ":" + std::to_string(c);
        }
        o.require(m[0]->str("map") == expect, "round " + std::to_string(round) + ": map " + m[0]->str("map") + " != " + expect);
        o.require(static_cast<int>(who.size()) == n, "round " + std::to_string(round) + ": only " +
                                                          std::to_string(who.size()) + "/" + std::to_string(n) + " answered");
        responders_total += who.size();
        ++checked;
    }
    o.detail = "example {(0,0):2, (2,2):1} reproduced; " + std::to_string(checked) + " random scenarios, " +
               std::to_string(responders_total) + " responders re-bucketed";
    return o;
}

// ---- 9 ------------------------------------------------------------------

Outcome gossip() {
    Outcome o;
    sim::Rng rng(99);
    std::size_t runs = 0;
    std::size_t max_n = 0;
    std::size_t max_fwd_ratio_num = 0;
    for (int round = 0; round < 40; ++round) {
        const int n = round < 4 ? 50 : static_cast<int>(rng.between(2, 50));
        // Random spanning tree plus a few chords.
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
        std::set<std::pair<int, int>> edges;
        auto add = [&](int a, int b) {
            if (a == b || edges.contains({std::min(a, b), std::max(a, b)})) return;
            edges.emplace(std::min(a, b), std::max(a, b));
            adj[static_cast<std::size_t>(a)].push_back(b);
            adj[static_cast<std::size_t>(b)].push_back(a);
        };
        for (int i = 1; i < n; ++i) add(i, static_cast<int>(rng.below(static_cast<std::uint64_t>(i))));
        const auto chords = rng.below(static_cast<std::uint64_t>(n / 2 + 1));
        for (std::uint64_t c = 0; c < chords; ++c) {
            add(static_cast<int>(rng.below(static_cast<std::uint64_t>(n))), static_cast<int>(rng.below(static_cast<std::uint64_t>(n))));
        }
        const int diam = oracle::diameter(adj);
        std::size_t max_degree = 0;
        for (const auto& a : adj) max_degree = std::max(max_degree, a.size());

        auto d = scenario_doc("gossip-" + std::to_string(round), 8000, static_cast<std::uint64_t>(round) + 7);
        d["params"]["hop_ttl"] = diam;
        d["params"]["fanout"] = max_degree;
        d["params"]["max_relay_hops"] = n;
        d["params"]["deadline_ms"] = 5000;
        d["nodes"].push_back(fog("F"));
        auto name = [](int i) { return "g" + std::to_string(i); };
        for (int i = 0; i < n; ++i) d["nodes"].push_back(sensor(name(i), i, 0));
        const int entry = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        d["links"].push_back(link("F", name(entry), 5));
        for (const auto& [a, b] : edges) d["links"].push_back(link(name(a), name(b), rng.between(1, 9)));
        d["apps"].push_back(Json{{"type", "general_query"}, {"fog", "F"}, {"required", "UNBOUNDED"}, {"at", 1000}});
        const auto trace = run_doc(d);

        const auto tag = "n=" + std::to_string(n) + " round " + std::to_string(round);
        std::map<std::string, int> answered;
        for (const auto* r : select(trace, "QUERY_ANSWER")) ++answered[r->node];
        o.require(static_cast<int>(answered.size()) == n, tag + ": " + std::to_string(answered.size()) + " sensors answered");
        for (const auto& [id, k] : answered) o.require(k == 1, tag + ": " + id + " answered " + std::to_string(k) + "x");
        std::set<std::string> at_fog;
        for (const auto* r : select(trace, "ANSWER")) at_fog.insert(r->str("sensor"));
        o.require(static_cast<int>(at_fog.size()) == n, tag + ": fog collected " + std::to_string(at_fog.size()));
        const auto fwd = count(trace, "GOSSIP_FWD");
        o.require(fwd <= static_cast<std::size_t>(n), tag + ": " + std::to_string(fwd) + " forwards");
        max_fwd_ratio_num = std::max(max_fwd_ratio_num, fwd);
        max_n = std::max(max_n, static_cast<std::size_t>(n));
        ++runs;
    }
    o.detail = std::to_string(runs) + " random connected graphs up to n=" + std::to_string(max_n) +
               ", every sensor answered once, forwards <= n";
    return o;
}

// ---- 10 -----------------------------------------------------------------

Outcome data_mule() {
    Outcome o;
    const auto sc = scenario::load_scenario_file(scenario_path("data_mule"));
    if (!sc.ok()) {
        o.require(false, "scenario does not load");
        return o;
    }
    const auto& s = *sc.scenario;
    const auto mule_apps = apps_of<scenario::DataMuleApp>(s);
    if (mule_apps.size() != 1) {
        o.require(false, "expected one data_mule app");
        return o;
    }
    const auto& cfg = *mule_apps[0];
    std::set<std::string> sites;
    for (const auto& n : s.nodes) {
        for (const auto& st : n.profile.streams) {
            if (st.name == cfg.stream) sites.insert(n.id);
        }
    }
    const auto trace = scenario::run_scenario(s);

    std::map<std::string, std::vector<const TraceRecord*>> raw;
    for (const auto* r : select(trace, "SAMPLE", [&](const TraceRecord& r) { return r.str("stream") == cfg.stream; })) {
        raw[r->node].push_back(r);
    }
    for (const auto& site : sites) {
        o.require(raw[site].size() >= 1000, site + " has only " + std::to_string(raw[site].size()) + " raw samples");
    }

    const auto uploads = select(trace, "UPLOAD", [&](const TraceRecord& r) { return r.node == cfg.fog; });
    if (uploads.empty()) {
        o.require(false, "no upload");
        return o;
    }
    const auto* up = uploads.back();
    const auto pubs = select(trace, "PUBLISH", [&](const TraceRecord& r) {
        return r.node == cfg.fog && r.str("topic") == "MULE" && r.time == up->time && r.seq > up->seq;
    });
    if (pubs.empty()) {
        o.require(false, "upload payload not published");
        return o;
    }
    const auto payload = nlohmann::json::parse(pubs.front()->str("payload"));
    const auto expected_records = sites.size() * cfg.metrics.size();
    o.require(payload.size() == expected_records, "uploaded " + std::to_string(payload.size()) + " records, expected " +
                                                      std::to_string(expected_records));
    o.require(up->integer("records") == static_cast<std::int64_t>(expected_records), "UPLOAD record count");

    // Brute force from the raw log over exactly the windows folded before the upload.
    std::int64_t raw_in_windows = 0;
    std::map<std::string, std::int64_t> per_site;
    for (const auto& rec : payload) {
        const auto site = rec["site"].get<std::string>();
        const auto metric = rec["metric"].get<std::string>();
        std::vector<std::pair<std::int64_t, std::int64_t>> windows;
        for (const auto* f : select(trace, "MULE_FOLD", [&](const TraceRecord& r) {
                 return r.seq < up->seq && r.str("site") == site && r.str("metric") == metric && r.str("agg") == "COUNT";
             })) {
            windows.emplace_back(f->integer("window_end") - f->integer("window"), f->integer("window_end"));
        }
        std::int64_t n = 0;
        double sum = 0;
        double mn = std::numeric_limits<double>::infinity();
        double mx = -std::numeric_limits<double>::infinity();
        std::int64_t last = 0;
        for (const auto& [lo, hi] : windows) {
            double wsum = 0;
            for (const auto* smp : raw[site]) {
                if (smp->time.ms() <= lo || smp->time.ms() > hi || !smp->has(metric)) continue;
                const double v = smp->number(metric);
                ++n;
                wsum += v;
                mn = std::min(mn, v);
                mx = std::max(mx, v);
            }
            sum += wsum;
            last = std::max(last, hi);
        }
        const auto tag = site + "/" + metric;
        o.require(rec["count"].get<std::int64_t>() == n, tag + ": count " + rec["count"].dump() + " vs " + std::to_string(n));
        const double got_sum = rec["sum"].get<double>();
        o.require(std::fabs(got_sum - sum) <= 1e-9 * std::max(1.0, std::fabs(sum)), tag + ": sum differs");
        o.require(rec["min"].get<double>() == mn, tag + ": min differs");
        o.require(rec["max"].get<double>() == mx, tag + ": max differs");
        o.require(rec["last_time"].get<std::int64_t>() == last, tag + ": last_time differs");
        per_site[site] = std::max(per_site[site], n);
    }
    for (const auto& [site, n] : per_site) raw_in_windows += n;

    const auto report = scenario::summarize(trace);
    const double ratio = report["apps"]["mule_compression_ratio"].get<double>();
    o.require(report["apps"]["mule_raw_samples"].get<std::int64_t>() == raw_in_windows, "summarize raw sample count");
    o.require(ratio >= 100.0, "compression ratio " + fmt(ratio));
    o.detail = std::to_string(sites.size()) + " sites x " + std::to_string(cfg.metrics.size()) + " metrics = " +
               std::to_string(payload.size()) + " records from " + std::to_string(raw_in_windows) +
               " samples, count/sum/min/max match brute force, ratio " + fmt(ratio, 1);
    return o;
}

// ---- 11 -----------------------------------------------------------------

std::vector<apps::Stop> parse_route(const std::string& text) {
    std::vector<apps::Stop> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, '>')) out.push_back(std::stoll(part));
    return out;
}

Outcome bus_routing() {
    Outcome o;
    std::size_t routes = 0;
    std::size_t calls = 0;
    double worst = 1.0;

    auto check_trace = [&](const std::string& tag, const Trace& trace, sim::Millis segment) {
        for (const auto* r : select(trace, "ROUTE")) {
            const auto route = parse_route(r->str("route"));
            if (route.size() > 9) continue;  // start + at most 8 stops
            const std::set<apps::Stop> stops(route.begin() + 1, route.end());
            const auto best = oracle::optimal_travel(route.front(), stops, segment);
            const auto travel = r->integer("travel");
            o.require(travel == apps::route_travel(route, segment), tag + ": ROUTE travel inconsistent");
            o.require(travel <= 2 * best, tag + ": route " + r->str("route") + " exceeds 2x optimum");
            if (best > 0) worst = std::max(worst, static_cast<double>(travel) / static_cast<double>(best));
            ++routes;
        }
        for (const auto* c : select(trace, "CALL_BUS")) {
            const auto stop = c->integer("stop");
            const bool visited = !select(trace, "VISITED", [&](const TraceRecord& r) {
                                      return r.integer("stop") == stop && r.time >= c->time;
                                  }).empty();
            o.require(visited, tag + ": call at stop " + std::to_string(stop) + " never visited");
            ++calls;
        }
    };

    {
        const auto sc = scenario::load_scenario_file(scenario_path("bus"));
        const auto trace = scenario::run_scenario(*sc.scenario);
        check_trace("bus", trace, apps_of<scenario::BusApp>(*sc.scenario).front()->segment_ms);
    }

    sim::Rng rng(1111);
    for (int round = 0; round < 20; ++round) {
        const sim::Millis segment = 1000 * rng.between(5, 60);
        auto d = scenario_doc("buses-" + std::to_string(round), 2000000, static_cast<std::uint64_t>(round) + 3);
        d["params"]["deadline_ms"] = 2000;
        const int buses = static_cast<int>(rng.between(1, 2));
        for (int b = 0; b < buses; ++b) {
            const auto id = "b" + std::to_string(b);
            d["nodes"].push_back(fog(id));
            d["apps"].push_back(Json{{"type", "bus"}, {"fog", id}, {"start_stop", rng.between(1, 8)}, {"segment_ms", segment},
                                     {"update_period_ms", 30000}});
        }
        if (buses == 2) d["links"].push_back(link("b0", "b1", 40));
        const int riders = static_cast<int>(rng.between(0, 5));
        for (int i = 0; i < riders; ++i) {
            const auto id = "r" + std::to_string(i);
            auto s = sensor(id);
            s["destination"] = rng.between(1, 8);
            d["nodes"].push_back(s);
            d["links"].push_back(link("b" + std::to_string(rng.below(static_cast<std::uint64_t>(buses))), id, 3));
        }
        const int callers = static_cast<int>(rng.between(1, 4));
        for (int i = 0; i < callers; ++i) {
            const auto id = "p" + std::to_string(i);
            d["nodes"].push_back(sensor(id));
            for (int b = 0; b < buses; ++b) d["links"].push_back(link("b" + std::to_string(b), id, 10));
            d["apps"].push_back(
                Json{{"type", "call_a_bus"}, {"sensor", id}, {"stop", rng.between(1, 8)}, {"at", {rng.between(1000, 300000)}}});
        }
        check_trace("random bus " + std::to_string(round), run_doc(d), segment);
    }

    // The planner itself on every instance of up to 8 stops on a short line.
    std::size_t instances = 0;
    for (apps::Stop start = 1; start <= 6; ++start) {
        for (unsigned mask = 0; mask < (1U << 6); ++mask) {
            std::set<apps::Stop> stops;
            for (unsigned b = 0; b < 6; ++b) {
                if (mask & (1U << b)) stops.insert(static_cast<apps::Stop>(b + 1));
            }
            const auto nn = apps::route_travel(apps::nearest_neighbor_route(start, stops), 1);
            const auto best = oracle::optimal_travel(start, stops, 1);
            o.require(nn <= 2 * best, "planner exceeds 2x optimum");
            if (best > 0) worst = std::max(worst, static_cast<double>(nn) / static_cast<double>(best));
            ++instances;
        }
    }
    for (int i = 0; i < 2000; ++i) {
        const auto start = rng.between(-20, 20);
        std::set<apps::Stop> stops;
        const auto n = rng.between(0, 8);
        while (static_cast<std::int64_t>(stops.size()) < n) stops.insert(rng.between(-20, 20));
        const auto nn = apps::route_travel(apps::nearest_neighbor_route(start, stops), 1);
        const auto best = oracle::optimal_travel(start, stops, 1);
        o.require(nn <= 2 * best, "planner exceeds 2x optimum");
        if (best > 0) worst = std::max(worst, static_cast<double>(nn) / static_cast<double>(best));
        ++instances;
    }
    o.require(routes > 0 && calls > 0, "no routes or calls exercised");
    o.detail = std::to_string(routes) + " traced routes + " + std::to_string(instances) +
               " planner instances, worst NN/optimal " + fmt(worst, 3) + " <= 2; " + std::to_string(calls) +
               " calls all visited";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"determinism", determinism},
        {"family-safety end to end", family_safety},
        {"at-most-once under dual paths", at_most_once},
        {"delay tolerance", delay_tolerance},
        {"query_all_sensors semantics", query_all},
        {"soft-state expiry", soft_state},
        {"mini-CQL oracle equivalence", cql_oracle},
        {"density map", density},
        {"gossip reach and termination", gossip},
        {"data mule", data_mule},
        {"bus routing", bus_routing},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto t0 = Clock::now();
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.problems.push_back(std::string("exception: ") + e.what());
        }
        const bool ok = o.problems.empty();
        failed += ok ? 0 : 1;
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << (i + 1) << " " << criteria[i].first << ": " << o.detail << " ("
                  << fmt(seconds_since(t0)) << " s)\n";
        for (std::size_t k = 0; k < o.problems.size() && k < 8; ++k) std::cout << "       - " << o.problems[k] << '\n';
        if (o.problems.size() > 8) std::cout << "       ... " << o.problems.size() - 8 << " more\n";
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
