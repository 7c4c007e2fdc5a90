#include "fogsense/components/fog.hpp"

#include <stdexcept>

namespace fogsense::components {

FogNode::FogNode(NodeId id, sim::Kernel& kernel, const Params& params)
    : InfraNode(std::move(id), Role::Fog, kernel, params) {}

void FogNode::on_start() {
    InfraNode::on_start();
    every(params().lease_period, [this] { renew_leases(); });
}

void FogNode::on_peer_connected(const NodeId& peer, Role role) {
    auto& hooks = role == Role::Cloud ? cloud_hooks_ : fog_hooks_;
    for (auto& hook : hooks) {
        hook(peer);
    }
}

void FogNode::on_packet(const NodeId& from, const Packet& packet) {
    if (packet.kind == PacketKind::Config) {
        note_heard(from);
        const auto blob = decode_config(packet.body);
        if (configs_.insert(blob.id).second) {
            trace("CONFIG_RECV", Fields{{"from", from}, {"config", blob.id}, {"bytes", blob.data.size()}});
        }
        return;
    }
    if (on_infra_packet(from, packet)) {
        return;
    }
    if (kernel().role(from) != Role::Sensor) {
        return;
    }
    if (packet.kind == PacketKind::Relay) {
        const auto env = decode_relay(packet.body);
        if (!relays_seen_.insert(env.id()).second) {
            trace("RELAY_DUP", Fields{{"relay", env.id()}, {"from", from}});
            return;
        }
        if (!env.dest.empty() && env.dest != id()) {
            return;
        }
        trace("RELAY_RECV", Fields{{"relay", env.id()}, {"src", env.src}, {"via", from}, {"hops", env.hops}});
        on_sensor_packet(env.src, decode_packet(env.inner), from);
        return;
    }
    on_sensor_packet(from, packet, std::nullopt);
}

void FogNode::on_sensor_packet(const NodeId& sensor, const Packet& packet, const std::optional<NodeId>& via) {
    switch (packet.kind) {
        case PacketKind::Register:
            register_sensor(sensor, decode_context(packet.body), via);
            break;
        case PacketKind::Data: {
            auto m = std::make_shared<const dtps::Message>(dtps::decode_message(packet.body));
            broker().receive(sensor, m);
            break;
        }
        default:
            break;
    }
}

void FogNode::register_sensor(const NodeId& sensor, SensorContext context, const std::optional<NodeId>& via) {
    const auto it = registry_.find(sensor);
    const bool fresh = it == registry_.end();
    // A keepalive that arrives late means the sensor was out of reach; its
    // leases get an immediate renewal instead of waiting for the next round.
    const bool overdue = fresh || now() - it->second.last_lease > params().lease_period;
    if (fresh) {
        registry_.emplace(sensor, SensorEntry{std::move(context), via, now(), now()});
    } else {
        it->second.context = std::move(context);
        it->second.via = via;
        it->second.last_lease = now();
    }
    const auto& entry = registry_.at(sensor);
    trace("REGISTER", Fields{{"sensor", sensor},
                             {"x", entry.context.x},
                             {"y", entry.context.y},
                             {"via", via.value_or("")},
                             {"fresh", fresh}});
    if (const auto a = active_.find(sensor); overdue && a != active_.end() && !a->second.empty()) {
        const std::vector<std::string> ids(a->second.begin(), a->second.end());
        send_to_sensor(sensor, Packet{PacketKind::Renew, encode_strings(ids)});
    }
    broker().flush(sensor);
    if (fresh) {
        for (auto& hook : sensor_hooks_) {
            hook(sensor);
        }
    }
}

void FogNode::renew_leases() {
    const auto timeout = params().expiry_threshold * params().lease_period;
    std::vector<NodeId> expired;
    for (const auto& [sensor, entry] : registry_) {
        if (now() - entry.last_lease > timeout) {
            expired.push_back(sensor);
        }
    }
    for (const auto& sensor : expired) {
        registry_.erase(sensor);
        if (const auto a = active_.find(sensor); a != active_.end()) {
            for (const auto& q : a->second) {
                query_target_.erase(q);
            }
            active_.erase(a);
        }
        broker().drop_queue(sensor);
        trace("UNREGISTER", Fields{{"sensor", sensor}});
    }
    for (const auto& [sensor, ids] : active_) {
        if (ids.empty()) {
            continue;
        }
        const std::vector<std::string> list(ids.begin(), ids.end());
        const auto outcome = send_to_sensor(sensor, Packet{PacketKind::Renew, encode_strings(list)});
        trace("RENEW", Fields{{"sensor", sensor},
                              {"queries", list.size()},
                              {"sent", outcome == sim::SendOutcome::Accepted}});
    }
}

sim::SendOutcome FogNode::send_to_sensor(const NodeId& sensor, const Packet& packet) {
    const auto it = registry_.find(sensor);
    if (it == registry_.end() || !it->second.via || link_up(sensor)) {
        return send_packet(sensor, packet);
    }
    RelayEnvelope env;
    env.relay_origin = id();
    env.relay_seq = next_relay_seq();
    env.src = id();
    env.dest = sensor;
    env.hops = 0;
    env.inner = encode(packet);
    return send_packet(*it->second.via, Packet{PacketKind::Relay, encode(env)});
}

std::string FogNode::next_query_id() { return id() + "#q" + std::to_string(next_query_++); }

std::string FogNode::query_specific_sensor(const NodeId& sensor, Query query, ReplyHandler on_reply) {
    if (!registry_.contains(sensor)) {
        throw std::invalid_argument("query_specific_sensor: sensor " + sensor + " is not registered at " + id());
    }
    query.id = next_query_id();
    query.reply_topic = "reply/" + query.id;
    query.issuer = id();
    query.general = false;
    if (query.is_continuous()) {
        query.lease_period = params().lease_period;
        active_[sensor].insert(query.id);
        query_target_[query.id] = sensor;
    } else {
        query.lease_period = 0;
    }
    if (on_reply) {
        subscribe(query.reply_topic, "reply", std::move(on_reply));
    }
    const auto outcome = send_to_sensor(sensor, Packet{PacketKind::Query, encode(query)});
    trace("QUERY_SENT", Fields{{"query", query.id},
                               {"sensor", sensor},
                               {"type", query.is_continuous() ? "continuous" : "one_time"},
                               {"what", query.is_continuous() ? query.text : std::string(to_string(query.prompt))},
                               {"sent", outcome == sim::SendOutcome::Accepted}});
    return query.id;
}

void FogNode::cancel_query(const std::string& query_id) {
    const auto it = query_target_.find(query_id);
    if (it == query_target_.end()) {
        return;
    }
    if (const auto a = active_.find(it->second); a != active_.end()) {
        a->second.erase(query_id);
    }
    query_target_.erase(it);
}

std::string FogNode::query_all_sensors(RequiredAnswers required, Query query, CloseHandler on_close) {
    query.id = next_query_id();
    query.reply_topic = "reply/" + query.id;
    query.issuer = id();
    query.general = true;
    query.required = required;
    query.hop_ttl = params().hop_ttl;
    query.lease_period = 0;
    query.issued_at = now();

    const auto qid = query.id;
    auto& state = general_[qid];
    state.required = required;
    state.on_close = std::move(on_close);
    subscribe(query.reply_topic, "answers", [this, qid](const dtps::Message& m) { on_answer(qid, m); });
    state.deadline = set_timer(params().deadline_ms, [this, qid] { close(qid, true); });

    std::size_t sent = 0;
    for (const auto& [sensor, entry] : registry_) {
        if (entry.via || !link_up(sensor)) {
            continue;
        }
        if (send_packet(sensor, Packet{PacketKind::Query, encode(query)}) == sim::SendOutcome::Accepted) {
            ++sent;
        }
    }
    trace("GENERAL_QUERY", Fields{{"query", qid},
                                  {"what", query.is_continuous() ? query.text : std::string(to_string(query.prompt))},
                                  {"required", required.str()},
                                  {"sent", sent},
                                  {"deadline", (now() + params().deadline_ms).ms()}});
    return qid;
}

void FogNode::on_answer(const std::string& query_id, const dtps::Message& message) {
    auto& state = general_.at(query_id);
    const auto& sensor = message.id.origin;
    if (state.closed) {
        trace("ANSWER_LATE", Fields{{"query", query_id}, {"sensor", sensor}});
        return;
    }
    if (!state.answers.emplace(sensor, message.payload_text()).second) {
        return;
    }
    trace("ANSWER", Fields{{"query", query_id}, {"sensor", sensor}, {"payload", message.payload_text()}});
    if (state.required.met_by(state.answers.size())) {
        close(query_id, false);
    }
}

void FogNode::close(const std::string& query_id, bool at_deadline) {
    auto& state = general_.at(query_id);
    if (state.closed) {
        return;
    }
    state.closed = true;
    if (!at_deadline) {
        cancel_timer(state.deadline);
    }
    GeneralQueryResult result;
    result.query_id = query_id;
    result.answers = state.answers;
    result.required = state.required;
    result.partial = !state.required.is_unbounded() && !state.required.met_by(state.answers.size());
    result.closed_at = now();

    std::string responders;
    for (const auto& [sensor, payload] : result.answers) {
        responders += (responders.empty() ? "" : ",") + sensor;
    }
    trace("QUERY_CLOSED", Fields{{"query", query_id},
                                 {"answers", result.answers.size()},
                                 {"required", state.required.str()},
                                 {"partial", result.partial},
                                 {"deadline", at_deadline},
                                 {"responders", responders}});
    if (state.on_close) {
        auto fn = state.on_close;
        fn(result);
    }
}

std::vector<NodeId> FogNode::routes_for(const dtps::Message& message) {
    auto out = InfraNode::routes_for(message);
    for (const auto& [sensor, entry] : registry_) {
        for (const auto& t : entry.context.topics) {
            if (t == message.topic.name()) {
                out.push_back(sensor);
                break;
            }
        }
    }
    return out;
}

sim::SendOutcome FogNode::transmit(const NodeId& neighbor, const dtps::Message& message) {
    if (kernel().role(neighbor) == Role::Sensor) {
        return send_to_sensor(neighbor, data_packet(message));
    }
    return InfraNode::transmit(neighbor, message);
}

}  // namespace fogsense::components
