#pragma once

#include <map>
#include <set>

#include "fogsense/components/node.hpp"

namespace fogsense::components {

/// Common behavior of fog and cloud nodes: the live peer set, heartbeats
/// and pull-based anti-entropy over the retained message store.
///
/// A peer joins the set when it announces itself (HELLO on link-up, or any
/// packet from an unknown infrastructure node) and leaves after
/// `expiry_threshold` anti-entropy intervals of silence. Each round sends a
/// digest of held ids; the receiver requests whatever it lacks. Both sides
/// run rounds, so a full exchange moves the symmetric difference.
class InfraNode : public Node {
public:
    InfraNode(NodeId id, Role role, sim::Kernel& kernel, const Params& params);

    /// Sends a digest to `peer`. No-op (returns false) when the link is down.
    bool anti_entropy(const NodeId& peer);

    [[nodiscard]] std::vector<NodeId> peers() const;
    [[nodiscard]] bool is_peer(const NodeId& id) const { return peers_.contains(id); }

protected:
    void on_start() override;
    void on_link_up(const NodeId& peer) override;

    /// Handles infrastructure packets; returns false if `packet` is not one.
    bool on_infra_packet(const NodeId& from, const Packet& packet);

    /// Called once per new peer, before the immediate anti-entropy round.
    virtual void on_peer_connected(const NodeId& peer, Role role) = 0;

    std::vector<NodeId> routes_for(const dtps::Message& message) override;
    sim::SendOutcome transmit(const NodeId& neighbor, const dtps::Message& message) override;

    void note_heard(const NodeId& peer);

private:
    struct PeerInfo {
        Role role;
        sim::SimTime last_heard;
    };

    void connect(const NodeId& peer);
    void round();
    void on_digest(const NodeId& from, const std::vector<dtps::MessageId>& ids);
    void on_request(const NodeId& from, const std::vector<dtps::MessageId>& ids);

    std::map<NodeId, PeerInfo> peers_;
};

}  // namespace fogsense::components
