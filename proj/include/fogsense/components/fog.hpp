#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "fogsense/components/infra.hpp"
#include "fogsense/components/query.hpp"

namespace fogsense::components {

struct SensorEntry {
    SensorContext context;
    std::optional<NodeId> via;  // relay sensor, if registered indirectly
    SimTime registered_at;
    SimTime last_lease;
};

/// Raw answer set of a closed general query, keyed by responding sensor.
struct GeneralQueryResult {
    std::string query_id;
    std::map<NodeId, std::string> answers;
    RequiredAnswers required = RequiredAnswers::unbounded();
    bool partial = false;
    SimTime closed_at;
};

class FogNode : public InfraNode {
public:
    using SensorHook = std::function<void(const NodeId& sensor)>;
    using PeerHook = std::function<void(const NodeId& peer)>;
    using ReplyHandler = std::function<void(const dtps::Message&)>;
    using CloseHandler = std::function<void(const GeneralQueryResult&)>;

    FogNode(NodeId id, sim::Kernel& kernel, const Params& params);

    /// Hooks fire on fresh registration / new peer, in registration order.
    void on_sensor_connection(SensorHook hook) { sensor_hooks_.push_back(std::move(hook)); }
    void on_fog_connection(PeerHook hook) { fog_hooks_.push_back(std::move(hook)); }
    void on_cloud_connection(PeerHook hook) { cloud_hooks_.push_back(std::move(hook)); }

    /// Sends `query` to a registered sensor, directly or through its relay.
    /// Fills in id, reply topic, issuer and (for continuous queries) the lease.
    /// Throws std::invalid_argument for an unknown sensor.
    std::string query_specific_sensor(const NodeId& sensor, Query query, ReplyHandler on_reply = {});

    /// Broadcasts a general query to every directly connected sensor.
    /// Throws std::invalid_argument when required is zero (see RequiredAnswers).
    std::string query_all_sensors(RequiredAnswers required, Query query, CloseHandler on_close = {});

    /// Stops renewing a continuous query; the sensor lets it expire.
    void cancel_query(const std::string& query_id);

    [[nodiscard]] const std::map<NodeId, SensorEntry>& registry() const { return registry_; }
    [[nodiscard]] const std::set<std::string>& configs() const { return configs_; }

protected:
    void on_start() override;
    void on_packet(const NodeId& from, const Packet& packet) override;
    void on_peer_connected(const NodeId& peer, Role role) override;

    std::vector<NodeId> routes_for(const dtps::Message& message) override;
    sim::SendOutcome transmit(const NodeId& neighbor, const dtps::Message& message) override;

private:
    struct GeneralState {
        RequiredAnswers required = RequiredAnswers::unbounded();
        std::map<NodeId, std::string> answers;
        TimerId deadline = 0;
        bool closed = false;
        CloseHandler on_close;
    };

    void on_sensor_packet(const NodeId& sensor, const Packet& packet, const std::optional<NodeId>& via);
    void register_sensor(const NodeId& sensor, SensorContext context, const std::optional<NodeId>& via);
    void renew_leases();
    sim::SendOutcome send_to_sensor(const NodeId& sensor, const Packet& packet);
    std::string next_query_id();
    void on_answer(const std::string& query_id, const dtps::Message& message);
    void close(const std::string& query_id, bool at_deadline);

    std::map<NodeId, SensorEntry> registry_;
    std::map<NodeId, std::set<std::string>> active_;  // sensor -> continuous query ids
    std::map<std::string, NodeId> query_target_;
    std::map<std::string, GeneralState> general_;
    std::set<std::string> relays_seen_;
    std::set<std::string> configs_;
    std::vector<SensorHook> sensor_hooks_;
    std::vector<PeerHook> fog_hooks_;
    std::vector<PeerHook> cloud_hooks_;
    std::uint64_t next_query_ = 0;
};

}  // namespace fogsense::components
