#include <gtest/gtest.h>

#include <map>
#include <set>

#include "fogsense/dtps/broker.hpp"
#include "fogsense/scenario/simulation.hpp"
#include "harness.hpp"

namespace {

using namespace fogsense;
using namespace fogsense::testing;

Json subscribe(const std::string& node, const std::string& topic) {
    return Json{{"type", "subscribe"}, {"node", node}, {"topic", topic}};
}

Json publish(const std::string& node, const std::string& topic, const std::vector<std::int64_t>& at,
             const std::string& payload = "x") {
    return Json{{"type", "publish"}, {"node", node}, {"topic", topic}, {"payload", payload}, {"at", at}};
}

std::size_t delivers(const Trace& t, const std::string& node) {
    return select(t, "DELIVER", [&](const TraceRecord& r) { return r.node == node; }).size();
}

TEST(Dtps, ChainDeliversExactlyOnce) {
    auto d = scenario_doc("chain", 60000);
    for (auto id : {"f1", "f2", "f3"}) d["nodes"].push_back(fog(id));
    d["links"].push_back(link("f1", "f2", 10));
    d["links"].push_back(link("f2", "f3", 10));
    d["apps"].push_back(subscribe("f3", "news"));
    d["apps"].push_back(publish("f1", "news", {1000}));
    const auto t = run_doc(d);
    const auto got = select(t, "DELIVER", [](const TraceRecord& r) { return r.node == "f3"; });
    ASSERT_EQ(got.size(), 1U);
    EXPECT_EQ(got[0]->time.ms(), 1020);
}

TEST(Dtps, RingTerminatesAndSuppressesDuplicates) {
    auto d = scenario_doc("ring", 60000);
    for (auto id : {"f1", "f2", "f3"}) {
        d["nodes"].push_back(fog(id));
        d["apps"].push_back(subscribe(id, "news"));
    }
    d["links"].push_back(link("f1", "f2", 10));
    d["links"].push_back(link("f2", "f3", 10));
    d["links"].push_back(link("f3", "f1", 10));
    d["apps"].push_back(publish("f1", "news", {1000, 2000, 3000}));
    const auto t = run_doc(d);
    for (auto id : {"f1", "f2", "f3"}) EXPECT_EQ(delivers(t, id), 3U) << id;
    EXPECT_GT(count(t, "DUP"), 0U);
    EXPECT_LT(t.size(), 5000U);
}

TEST(Dtps, SensorPublishReachesFogAfterLatency) {
    auto d = scenario_doc("ok", 20000);
    d["nodes"].push_back(fog("F"));
    d["nodes"].push_back(sensor("s1"));
    d["links"].push_back(link("F", "s1", 7));
    d["apps"].push_back(subscribe("F", "OK"));
    d["apps"].push_back(publish("s1", "OK", {1000}, "+15550001"));
    const auto t = run_doc(d);
    const auto got = select(t, "DELIVER", [](const TraceRecord& r) { return r.node == "F"; });
    ASSERT_EQ(got.size(), 1U);
    EXPECT_EQ(got[0]->time.ms(), 1007);
}

TEST(Dtps, PublishWhileDisconnectedWaitsForLink) {
    auto d = scenario_doc("queued", 20000);
    d["nodes"].push_back(fog("F"));
    d["nodes"].push_back(sensor("s1"));
    d["links"].push_back(link("F", "s1", 7, {{5000, 20000}}));
    d["apps"].push_back(subscribe("F", "OK"));
    d["apps"].push_back(publish("s1", "OK", {1000}));
    const auto t = run_doc(d);
    const auto got = select(t, "DELIVER", [](const TraceRecord& r) { return r.node == "F"; });
    ASSERT_EQ(got.size(), 1U);
    EXPECT_EQ(got[0]->time.ms(), 5007);
}

TEST(Dtps, NoSubscribersStillTraced) {
    auto d = scenario_doc("silent", 20000);
    d["nodes"].push_back(fog("f1"));
    d["nodes"].push_back(fog("f2"));
    d["links"].push_back(link("f1", "f2", 5));
    d["apps"].push_back(publish("f1", "void", {1000}));
    const auto t = run_doc(d);
    EXPECT_EQ(count(t, "PUBLISH"), 1U);
    EXPECT_EQ(count(t, "DELIVER"), 0U);
}

TEST(Dtps, LateSubscriberGetsNoReplay) {
    auto d = scenario_doc("late", 20000);
    d["nodes"].push_back(fog("f1"));
    d["nodes"].push_back(fog("f2"));
    d["links"].push_back(link("f1", "f2", 5));
    d["apps"].push_back(publish("f1", "news", {1000, 8000}));
    scenario::Simulation sim(load_doc(d));
    int calls = 0;
    auto& f2 = sim.fog("f2");
    f2.set_timer(5000, [&] { f2.subscribe("news", "late", [&](const dtps::Message&) { ++calls; }); });
    sim.run();
    EXPECT_EQ(calls, 1);  // only the 8000 ms message
}

TEST(Dtps, DupCountMatchesReceives) {
    const auto t = run_file(scenario_path("dual_path"));
    std::set<std::pair<std::string, std::string>> distinct;
    for (const auto* r : select(t, "MSG_RECV")) distinct.emplace(r->node, r->str("msg"));
    EXPECT_EQ(count(t, "DUP"), count(t, "MSG_RECV") - distinct.size());
    EXPECT_GT(count(t, "DUP"), 0U);
}

TEST(Dtps, AntiEntropyExchangesSymmetricDifference) {
    auto d = scenario_doc("ae", 60000);
    d["params"]["anti_entropy_interval"] = 10000;
    d["nodes"].push_back(fog("f1"));
    d["nodes"].push_back(fog("f2"));
    d["links"].push_back(link("f1", "f2", 10, {{30000, 60000}}));
    d["apps"].push_back(publish("f1", "a", {1000, 2000}));
    d["apps"].push_back(publish("f2", "b", {1500, 2500, 3500}));
    const auto t = run_doc(d);
    std::int64_t wanted = 0;
    for (const auto* r : select(t, "AE_SYNC")) wanted += r->integer("want");
    EXPECT_EQ(wanted, 5);
    EXPECT_EQ(count(t, "MSG_RECV"), 5U);
    // Once converged, later rounds exchange nothing.
    for (const auto* r : select(t, "AE_SYNC", [](const TraceRecord& r) { return r.time.ms() > 40000; })) {
        EXPECT_EQ(r->integer("want"), 0);
    }
}

TEST(Dtps, PartitionHealDeliversWithinOneRound) {
    auto d = scenario_doc("heal", 90000);
    d["params"]["anti_entropy_interval"] = 10000;
    d["nodes"].push_back(fog("f1"));
    d["nodes"].push_back(fog("f2"));
    d["links"].push_back(link("f1", "f2", 25, {{0, 500}, {20000, 90000}}));
    d["apps"].push_back(subscribe("f2", "news"));
    d["apps"].push_back(publish("f1", "news", {1000, 5000}));
    const auto t = run_doc(d);
    const auto got = select(t, "DELIVER", [](const TraceRecord& r) { return r.node == "f2"; });
    ASSERT_EQ(got.size(), 2U);
    for (const auto* r : got) EXPECT_LE(r->time.ms(), 20000 + 10000 + 25 * 3);
}

TEST(Dtps, QueueOverflowDropsOldest) {
    auto d = scenario_doc("overflow", 30000);
    d["params"]["queue_capacity"] = 2;
    d["nodes"].push_back(fog("F"));
    d["nodes"].push_back(sensor("s1"));
    d["links"].push_back(link("F", "s1", 5, {{10000, 30000}}));
    d["apps"].push_back(subscribe("F", "r"));
    d["apps"].push_back(publish("s1", "r", {1000, 2000, 3000, 4000, 5000}));
    const auto t = run_doc(d);
    EXPECT_EQ(count(t, "QUEUE_DROP"), 3U);
    const auto got = select(t, "DELIVER", [](const TraceRecord& r) { return r.node == "F"; });
    ASSERT_EQ(got.size(), 2U);
    EXPECT_EQ(got[0]->str("msg"), "s1#3");
    EXPECT_EQ(got[1]->str("msg"), "s1#4");
}

TEST(Dtps, PerOriginFifoOverStableLink) {
    auto d = scenario_doc("fifo", 60000);
    d["nodes"].push_back(fog("f1"));
    d["nodes"].push_back(fog("f2"));
    d["links"].push_back(link("f1", "f2", 30));
    d["apps"].push_back(subscribe("f2", "seq"));
    std::vector<std::int64_t> at;
    for (int i = 0; i < 40; ++i) at.push_back(1000 + i * 3);
    d["apps"].push_back(publish("f1", "seq", at));
    const auto t = run_doc(d);
    std::uint64_t last = 0;
    bool first = true;
    for (const auto* r : select(t, "DELIVER", [](const TraceRecord& r) { return r.node == "f2"; })) {
        const auto seq = dtps::MessageId::parse(r->str("msg")).seq;
        if (!first) EXPECT_GT(seq, last);
        last = seq;
        first = false;
    }
}

TEST(Dtps, EveryDeliveredIdWasPublishedOnce) {
    for (const auto& name : bundled_scenarios()) {
        const auto t = run_file(scenario_path(name));
        std::map<std::string, int> published;
        for (const auto* r : select(t, "PUBLISH")) ++published[r->str("msg")];
        for (const auto& [id, n] : published) EXPECT_EQ(n, 1) << name << " " << id;
        for (const auto* r : select(t, "DELIVER")) EXPECT_TRUE(published.contains(r->str("msg"))) << name;
    }
}

// Broker-level reconciliation without a network.
struct NullHost : dtps::BrokerHost {
    std::vector<sim::NodeId> routes_for(const dtps::Message&) override { return {}; }
    sim::SendOutcome transmit(const sim::NodeId&, const dtps::Message&) override { return sim::SendOutcome::NoLink; }
};

TEST(Broker, ReconcileDisjointStores) {
    sim::Kernel k(1);
    NullHost ha;
    NullHost hb;
    dtps::Broker a("a", k, ha, {});
    dtps::Broker b("b", k, hb, {});
    for (int i = 0; i < 2; ++i) a.publish(dtps::Topic("t"), dtps::to_bytes("a"));
    for (int i = 0; i < 3; ++i) b.publish(dtps::Topic("t"), dtps::to_bytes("b"));
    const auto ab = a.reconcile(b.digest());
    const auto ba = b.reconcile(a.digest());
    EXPECT_EQ(ab.want.size(), 3U);
    EXPECT_EQ(ba.want.size(), 2U);
    EXPECT_EQ(ab.want.size() + ba.want.size(), 5U);

    for (const auto& m : b.lookup(ab.want)) a.receive("b", m);
    for (const auto& m : a.lookup(ba.want)) b.receive("a", m);
    EXPECT_TRUE(a.reconcile(b.digest()).want.empty());
    EXPECT_TRUE(a.reconcile(b.digest()).push.empty());
    EXPECT_EQ(a.digest(), b.digest());
}

TEST(Broker, HandlersRunOncePerMessage) {
    sim::Kernel k(1);
    NullHost h;
    dtps::Broker br("n", k, h, {});
    int calls = 0;
    br.subscribe(dtps::Topic("t"), "h", [&](const dtps::Message&) { ++calls; });
    br.subscribe(dtps::Topic("t"), "h", [&](const dtps::Message&) { ++calls; });  // idempotent
    auto m = std::make_shared<const dtps::Message>(
        dtps::Message{dtps::MessageId{"x", 0}, dtps::Topic("t"), dtps::to_bytes("p"), sim::SimTime{0}});
    br.receive("p1", m);
    br.receive("p2", m);
    EXPECT_EQ(calls, 1);
    EXPECT_TRUE(br.seen(m->id));
}

}  // namespace
