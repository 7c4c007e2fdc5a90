#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fogsense/components/params.hpp"
#include "fogsense/components/protocol.hpp"
#include "fogsense/dtps/broker.hpp"
#include "fogsense/sim/kernel.hpp"

namespace fogsense::components {

using sim::Fields;
using sim::Role;
using TimerId = std::uint64_t;

/// Shared plumbing for the three component kinds: event dispatch, timers,
/// the pub/sub broker and packet transmission.
class Node : public sim::EventHandler, protected dtps::BrokerHost {
public:
    Node(NodeId id, Role role, sim::Kernel& kernel, const Params& params, dtps::BrokerConfig broker_config);
    ~Node() override = default;

    Node(const Node&) = delete;
    Node& operator=(const Node&) = delete;

    [[nodiscard]] const NodeId& id() const { return id_; }
    [[nodiscard]] Role role() const { return role_; }
    [[nodiscard]] const Params& params() const { return params_; }

    dtps::MessageId publish(const std::string& topic, Bytes payload);
    dtps::MessageId publish(const std::string& topic, std::string_view text) {
        return publish(topic, dtps::to_bytes(text));
    }
    dtps::SubscriptionId subscribe(const std::string& topic, const std::string& handler_name, dtps::Handler handler);

    TimerId set_timer(sim::Millis delay, std::function<void()> fn);
    void cancel_timer(TimerId id);
    /// Runs `fn` every `period` ms, first after one period, until the run ends.
    void every(sim::Millis period, std::function<void()> fn);

    /// Runs when the node receives its START event, in registration order.
    void add_start_hook(std::function<void()> hook) { start_hooks_.push_back(std::move(hook)); }

    void handle(const sim::Event& event) final;

    [[nodiscard]] sim::SimTime now() const { return kernel_.now(); }
    sim::Kernel& kernel() { return kernel_; }
    dtps::Broker& broker() { return broker_; }
    void trace(std::string kind, Fields fields = {}) { kernel_.trace(id_, std::move(kind), std::move(fields)); }

protected:
    virtual void on_start() {}
    virtual void on_link_up(const NodeId& /*peer*/) {}
    virtual void on_packet(const NodeId& from, const Packet& packet) = 0;

    sim::SendOutcome send_packet(const NodeId& to, const Packet& packet);

    [[nodiscard]] bool link_up(const NodeId& peer) const { return kernel_.link_up_now(id_, peer); }
    [[nodiscard]] std::vector<NodeId> declared_neighbors(Role role) const;

    std::uint64_t next_relay_seq() { return relay_seq_++; }

private:
    void every_again(sim::Millis period, const std::shared_ptr<std::function<void()>>& fn);

    NodeId id_;
    Role role_;
    sim::Kernel& kernel_;
    Params params_;
    dtps::Broker broker_;
    TimerId next_timer_ = 1;
    std::map<TimerId, std::pair<sim::EventHandle, std::function<void()>>> timers_;
    std::vector<std::function<void()>> start_hooks_;
    std::uint64_t relay_seq_ = 0;
};

}  // namespace fogsense::components
