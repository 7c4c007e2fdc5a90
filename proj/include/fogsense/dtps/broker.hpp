#pragma once

#include <deque>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fogsense/dtps/message.hpp"
#include "fogsense/sim/kernel.hpp"

namespace fogsense::dtps {

using Handler = std::function<void(const Message&)>;
using SubscriptionId = std::uint64_t;

/// Implemented by the node that owns a broker: decides where a message goes
/// next and performs the actual transmission.
class BrokerHost {
public:
    virtual ~BrokerHost() = default;

    /// Neighbors a message should be pushed toward. The broker removes the
    /// neighbor the message arrived from.
    virtual std::vector<NodeId> routes_for(const Message& message) = 0;

    virtual sim::SendOutcome transmit(const NodeId& neighbor, const Message& message) = 0;
};

struct BrokerConfig {
    std::size_t queue_capacity = 1024;
    /// 0 keeps retained messages forever.
    sim::Millis retain_ttl = 0;
    /// Infrastructure nodes re-forward what they receive; sensors are leaves.
    bool forward_received = true;
    /// Keep message bodies for anti-entropy.
    bool retain = true;
};

/// Difference between a local store and a peer digest.
struct Reconciliation {
    std::vector<MessageId> want;   // ids the peer has and we lack
    std::vector<MessagePtr> push;  // messages we have and the peer lacks
};

/// Per-node delay-tolerant pub/sub engine: subscriptions, duplicate
/// suppression, per-neighbor FIFO outbound queues and the retained store
/// used for anti-entropy.
class Broker {
public:
    Broker(NodeId self, sim::Kernel& kernel, BrokerHost& host, BrokerConfig config);

    /// Idempotent for an identical (topic, handler name) pair.
    SubscriptionId subscribe(const Topic& topic, const std::string& handler_name, Handler handler);

    MessageId publish(const Topic& topic, Bytes payload);

    /// Processes a message that arrived from `from`: duplicate check, local
    /// delivery, then re-enqueue toward every other route.
    void receive(const NodeId& from, const MessagePtr& message);

    /// Ids held in the retained store, ascending.
    [[nodiscard]] std::vector<MessageId> digest();
    [[nodiscard]] Reconciliation reconcile(const std::vector<MessageId>& peer_ids);
    [[nodiscard]] std::vector<MessagePtr> lookup(const std::vector<MessageId>& ids) const;

    void flush(const NodeId& neighbor);
    void flush_all();
    void drop_queue(const NodeId& neighbor);

    /// Distinct subscribed topic names, ascending.
    [[nodiscard]] std::vector<std::string> topics() const;

    [[nodiscard]] bool seen(const MessageId& id) const { return seen_.contains(id); }
    [[nodiscard]] std::size_t store_size() const { return store_.size(); }
    [[nodiscard]] std::size_t queue_length(const NodeId& neighbor) const;
    [[nodiscard]] const BrokerConfig& config() const { return config_; }

private:
    struct Subscription {
        SubscriptionId id;
        Topic topic;
        std::string name;
        Handler handler;
    };

    void accept(const NodeId* from, const MessagePtr& message);
    void deliver_locally(const Message& message);
    void enqueue(const NodeId& neighbor, const MessagePtr& message);
    void prune();

    NodeId self_;
    sim::Kernel& kernel_;
    BrokerHost& host_;
    BrokerConfig config_;
    std::uint64_t next_seq_ = 0;
    SubscriptionId next_sub_ = 1;
    std::vector<Subscription> subscriptions_;
    std::set<MessageId> seen_;
    std::map<MessageId, MessagePtr> store_;
    std::map<NodeId, std::deque<MessagePtr>> queues_;
};

}  // namespace fogsense::dtps
