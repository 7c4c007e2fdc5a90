#include "fogsense/components/infra.hpp"

namespace fogsense::components {

namespace {

dtps::BrokerConfig infra_broker(const Params& p) {
    dtps::BrokerConfig c;
    c.queue_capacity = static_cast<std::size_t>(p.queue_capacity);
    c.retain_ttl = p.retain_ttl;
    c.forward_received = true;
    c.retain = true;
    return c;
}

bool is_infra(Role r) { return r == Role::Fog || r == Role::Cloud; }

}  // namespace

InfraNode::InfraNode(NodeId id, Role role, sim::Kernel& kernel, const Params& params)
    : Node(std::move(id), role, kernel, params, infra_broker(params)) {}

void InfraNode::on_start() {
    every(params().anti_entropy_interval, [this] { round(); });
}

void InfraNode::on_link_up(const NodeId& peer) {
    if (is_infra(kernel().role(peer))) {
        send_packet(peer, Packet{PacketKind::Hello, {}});
        broker().flush(peer);
    }
}

std::vector<NodeId> InfraNode::peers() const {
    std::vector<NodeId> out;
    for (const auto& [id, info] : peers_) {
        out.push_back(id);
    }
    return out;
}

void InfraNode::note_heard(const NodeId& peer) {
    if (const auto it = peers_.find(peer); it != peers_.end()) {
        it->second.last_heard = now();
    }
}

void InfraNode::connect(const NodeId& peer) {
    if (peers_.contains(peer)) {
        note_heard(peer);
        return;
    }
    const auto role = kernel().role(peer);
    peers_.emplace(peer, PeerInfo{role, now()});
    trace("PEER_UP", Fields{{"peer", peer}, {"role", std::string(sim::to_string(role))}});
    on_peer_connected(peer, role);
    set_timer(0, [this, peer] { anti_entropy(peer); });
}

bool InfraNode::anti_entropy(const NodeId& peer) {
    if (!link_up(peer)) {
        return false;
    }
    send_packet(peer, Packet{PacketKind::AeDigest, encode_ids(broker().digest())});
    return true;
}

void InfraNode::round() {
    const auto timeout = params().expiry_threshold * params().anti_entropy_interval;
    std::vector<NodeId> lost;
    for (const auto& [id, info] : peers_) {
        if (now() - info.last_heard > timeout) {
            lost.push_back(id);
        }
    }
    for (const auto& id : lost) {
        peers_.erase(id);
        broker().drop_queue(id);
        trace("PEER_DOWN", Fields{{"peer", id}});
    }
    for (const auto& [id, info] : peers_) {
        anti_entropy(id);
    }
}

bool InfraNode::on_infra_packet(const NodeId& from, const Packet& packet) {
    if (!kernel().has_node(from) || !is_infra(kernel().role(from))) {
        return false;
    }
    connect(from);
    switch (packet.kind) {
        case PacketKind::Hello:
            return true;
        case PacketKind::AeDigest:
            on_digest(from, decode_ids(packet.body));
            return true;
        case PacketKind::AeRequest:
            on_request(from, decode_ids(packet.body));
            return true;
        case PacketKind::Data: {
            auto m = std::make_shared<const dtps::Message>(dtps::decode_message(packet.body));
            broker().receive(from, m);
            return true;
        }
        default:
            return false;
    }
}

void InfraNode::on_digest(const NodeId& from, const std::vector<dtps::MessageId>& ids) {
    const auto r = broker().reconcile(ids);
    trace("AE_SYNC", Fields{{"peer", from}, {"offered", ids.size()}, {"want", r.want.size()}});
    if (!r.want.empty()) {
        send_packet(from, Packet{PacketKind::AeRequest, encode_ids(r.want)});
    }
}

void InfraNode::on_request(const NodeId& from, const std::vector<dtps::MessageId>& ids) {
    for (const auto& m : broker().lookup(ids)) {
        send_packet(from, data_packet(*m));
    }
}

std::vector<NodeId> InfraNode::routes_for(const dtps::Message& /*message*/) { return peers(); }

sim::SendOutcome InfraNode::transmit(const NodeId& neighbor, const dtps::Message& message) {
    return send_packet(neighbor, data_packet(message));
}

}  // namespace fogsense::components
