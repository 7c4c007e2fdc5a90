#include "fogsense/components/cloud.hpp"

namespace fogsense::components {

CloudNode::CloudNode(NodeId id, sim::Kernel& kernel, const Params& params)
    : InfraNode(std::move(id), Role::Cloud, kernel, params) {}

void CloudNode::push_config(const NodeId& fog, ConfigBlob blob) {
    trace("CONFIG_PUSH", Fields{{"fog", fog}, {"config", blob.id}});
    configs_.emplace_back(fog, std::move(blob));
    for (const auto& peer : peers()) {
        deliver_configs(peer);
    }
}

void CloudNode::on_packet(const NodeId& from, const Packet& packet) {
    on_infra_packet(from, packet);
}

void CloudNode::on_peer_connected(const NodeId& peer, Role role) {
    if (role == Role::Fog) {
        deliver_configs(peer);
    }
}

void CloudNode::deliver_configs(const NodeId& fog) {
    if (kernel().role(fog) != Role::Fog || !link_up(fog)) {
        return;
    }
    auto& done = delivered_[fog];
    for (const auto& [target, blob] : configs_) {
        if ((target != "*" && target != fog) || done.contains(blob.id)) {
            continue;
        }
        if (send_packet(fog, Packet{PacketKind::Config, encode(blob)}) == sim::SendOutcome::Accepted) {
            done.insert(blob.id);
        }
    }
}

}  // namespace fogsense::components
