#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fogsense/components/node.hpp"
#include "fogsense/components/query.hpp"
#include "fogsense/cql/executor.hpp"

namespace fogsense::components {

struct Waypoint {
    Millis t = 0;
    double x = 0;
    double y = 0;
};

/// How a simulated field value is produced for each sample.
struct FieldGen {
    enum class Kind : std::uint8_t { Const, Uniform, IntUniform, Counter, Text };
    Kind kind = Kind::Const;
    double a = 0;  // const value / lower bound / counter start
    double b = 0;  // upper bound / counter step
    std::string text;
};

struct StreamSpec {
    std::string name;
    Millis period = 1000;
    std::vector<std::pair<std::string, FieldGen>> fields;
};

/// Everything scenario-specific about one sensor device and its user.
struct SensorProfile {
    std::vector<Waypoint> waypoints;        // sorted by t; empty means (0, 0)
    std::optional<Millis> response_delay;   // nullopt: the user ignores prompts
    std::optional<std::int64_t> destination;
    std::int64_t persons_nearby = 0;
    std::vector<StreamSpec> streams;
};

/// Piecewise-linear interpolation, clamped at both ends.
std::pair<double, double> position_at(const std::vector<Waypoint>& waypoints, SimTime t);

class SensorNode : public Node {
public:
    /// Replaces the default answer for a one-time prompt. `fog` is the node
    /// the query came from (the issuer for gossiped queries).
    using PromptHandler = std::function<void(const Query& query)>;

    struct Lease {
        std::string query_id;
        cql::InstanceId instance = 0;
        SimTime installed_at;
        Millis lease_period = 0;
        std::int64_t renewals_missed = 0;
        bool renewed = true;
        std::optional<TimerId> tick;
        std::string reply_topic;
    };

    SensorNode(NodeId id, sim::Kernel& kernel, const Params& params, SensorProfile profile);

    [[nodiscard]] std::pair<double, double> position() const;
    [[nodiscard]] const SensorProfile& profile() const { return profile_; }

    void set_prompt_handler(PromptTag tag, PromptHandler handler) { prompt_handlers_[tag] = std::move(handler); }

    /// Simulated user interaction: after the profile's response delay,
    /// `on_confirm` runs; a user who ignores prompts never confirms.
    void ask_user(const Query& query, std::function<void()> on_confirm);

    /// Publishes a JSON object on the query's reply topic.
    void answer(const Query& query, std::string json_payload);

    /// Sends `packet` through sensor neighbors toward `target` ("" = any fog).
    void relay_send(const NodeId& target, const Packet& packet);

    /// One lease tick: counts missed renewals and uninstalls expired queries.
    std::vector<std::string> expire_queries();

    [[nodiscard]] const std::map<std::string, Lease>& leases() const { return leases_; }
    [[nodiscard]] bool sampling(const std::string& stream) const { return samplers_.contains(stream); }
    [[nodiscard]] std::vector<NodeId> live_fogs() const;

protected:
    void on_start() override;
    void on_link_up(const NodeId& peer) override;
    void on_packet(const NodeId& from, const Packet& packet) override;

    std::vector<NodeId> routes_for(const dtps::Message& message) override;
    sim::SendOutcome transmit(const NodeId& neighbor, const dtps::Message& message) override;

private:
    struct PendingRelay {
        RelayEnvelope env;
        NodeId from;
    };

    void on_specific_query(const NodeId& from, const Query& query);
    void on_general_query(const NodeId& from, const Query& query);
    void forward_gossip(const std::string& query_id);
    void handle_query(const Query& query);
    void install_continuous(const Query& query);
    void answer_one_time(const Query& query);
    void uninstall(const std::string& query_id, const char* reason);
    void arm_tick(const std::string& query_id, Millis every);

    void ensure_sampling(const std::string& stream);
    void sample(const StreamSpec& spec);
    void stop_unused_sampling();

    void on_relay(const NodeId& from, RelayEnvelope env);
    /// Returns false when the envelope had to be queued here.
    bool route_relay(const RelayEnvelope& env, const NodeId& from);
    void flush_relays();
    [[nodiscard]] std::vector<NodeId> live_sensor_neighbors() const;

    sim::SendOutcome uplink(const Packet& packet);
    void register_with(const std::optional<NodeId>& fog);
    [[nodiscard]] SensorContext context() const;

    SensorProfile profile_;
    cql::Executor executor_;
    std::map<std::string, Lease> leases_;
    std::set<std::string> seen_queries_;
    // General queries waiting for their forwarding slot: best copy so far
    // and everyone who already sent one.
    struct PendingGossip {
        Query best;
        std::set<NodeId> senders;
    };
    std::map<std::string, PendingGossip> pending_gossip_;
    std::set<std::string> seen_relays_;
    std::deque<PendingRelay> pending_relays_;
    std::map<std::string, TimerId> samplers_;
    std::map<std::string, double> counters_;
    std::map<PromptTag, PromptHandler> prompt_handlers_;
};

}  // namespace fogsense::components
