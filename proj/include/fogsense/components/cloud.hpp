#pragma once

#include <map>
#include <set>
#include <string>

#include "fogsense/components/infra.hpp"

namespace fogsense::components {

/// Top tier. Holds the global view through its own subscriptions (fed by
/// anti-entropy from connected fogs) and hands out configuration blobs.
class CloudNode : public InfraNode {
public:
    CloudNode(NodeId id, sim::Kernel& kernel, const Params& params);

    /// Queues `blob` for `fog` ("*" = every fog). Each fog receives a given
    /// blob once, on its next connection (immediately if already a peer).
    void push_config(const NodeId& fog, ConfigBlob blob);

protected:
    void on_packet(const NodeId& from, const Packet& packet) override;
    void on_peer_connected(const NodeId& peer, Role role) override;

private:
    void deliver_configs(const NodeId& fog);

    std::vector<std::pair<NodeId, ConfigBlob>> configs_;
    std::map<NodeId, std::set<std::string>> delivered_;
};

}  // namespace fogsense::components
