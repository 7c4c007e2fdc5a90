#include "fogsense/components/sensor.hpp"

#include <algorithm>
#include <json.hpp>

#include "fogsense/cql/parser.hpp"

namespace fogsense::components {

namespace {

using Json = nlohmann::ordered_json;

const NodeId kUplink = "@uplink";

dtps::BrokerConfig sensor_broker(const Params& p) {
    dtps::BrokerConfig c;
    c.queue_capacity = static_cast<std::size_t>(p.queue_capacity);
    c.forward_received = false;
    c.retain = false;
    return c;
}

Json value_json(const cql::Value& v) {
    if (const auto* d = std::get_if<double>(&v)) {
        return *d;
    }
    return std::get<std::string>(v);
}

sim::FieldValue value_field(const cql::Value& v) {
    if (const auto* d = std::get_if<double>(&v)) {
        return *d;
    }
    return std::get<std::string>(v);
}

}  // namespace

std::pair<double, double> position_at(const std::vector<Waypoint>& waypoints, SimTime t) {
    if (waypoints.empty()) {
        return {0.0, 0.0};
    }
    if (t.ms() <= waypoints.front().t) {
        return {waypoints.front().x, waypoints.front().y};
    }
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        const auto& a = waypoints[i - 1];
        const auto& b = waypoints[i];
        if (t.ms() < b.t) {
            const double f = static_cast<double>(t.ms() - a.t) / static_cast<double>(b.t - a.t);
            return {a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f};
        }
    }
    return {waypoints.back().x, waypoints.back().y};
}

SensorNode::SensorNode(NodeId id, sim::Kernel& kernel, const Params& params, SensorProfile profile)
    : Node(std::move(id), Role::Sensor, kernel, params, sensor_broker(params)), profile_(std::move(profile)) {}

std::pair<double, double> SensorNode::position() const { return position_at(profile_.waypoints, now()); }

void SensorNode::on_start() {
    every(params().lease_period, [this] {
        expire_queries();
        // Keepalive registration; also refreshes the subscribed topics.
        register_with(std::nullopt);
    });
}

std::vector<NodeId> SensorNode::live_fogs() const {
    std::vector<NodeId> out;
    for (const auto& f : declared_neighbors(Role::Fog)) {
        if (link_up(f)) {
            out.push_back(f);
        }
    }
    return out;
}

std::vector<NodeId> SensorNode::live_sensor_neighbors() const {
    std::vector<NodeId> out;
    for (const auto& s : declared_neighbors(Role::Sensor)) {
        if (link_up(s)) {
            out.push_back(s);
        }
    }
    return out;
}

SensorContext SensorNode::context() const {
    SensorContext c;
    std::tie(c.x, c.y) = position();
    c.neighbors = live_sensor_neighbors();
    c.topics = const_cast<SensorNode*>(this)->broker().topics();
    return c;
}

void SensorNode::register_with(const std::optional<NodeId>& fog) {
    const Packet p{PacketKind::Register, encode(context())};
    if (fog) {
        send_packet(*fog, p);
        return;
    }
    if (!live_fogs().empty() || !live_sensor_neighbors().empty()) {
        uplink(p);
    }
}

void SensorNode::on_link_up(const NodeId& peer) {
    const auto role = kernel().role(peer);
    if (role == Role::Fog) {
        register_with(peer);
    } else if (role == Role::Sensor && live_fogs().empty()) {
        register_with(std::nullopt);
    } else {
        return;
    }
    broker().flush_all();
    flush_relays();
}

sim::SendOutcome SensorNode::uplink(const Packet& packet) {
    const auto fogs = live_fogs();
    if (!fogs.empty()) {
        for (const auto& f : fogs) {
            send_packet(f, packet);
        }
        return sim::SendOutcome::Accepted;
    }
    if (live_sensor_neighbors().empty()) {
        return sim::SendOutcome::NoLink;
    }
    relay_send("", packet);
    return sim::SendOutcome::Accepted;
}

std::vector<NodeId> SensorNode::routes_for(const dtps::Message& /*message*/) { return {kUplink}; }

sim::SendOutcome SensorNode::transmit(const NodeId& /*neighbor*/, const dtps::Message& message) {
    return uplink(data_packet(message));
}

// ---- packets -------------------------------------------------------------

void SensorNode::on_packet(const NodeId& from, const Packet& packet) {
    switch (packet.kind) {
        case PacketKind::Relay:
            on_relay(from, decode_relay(packet.body));
            break;
        case PacketKind::Query: {
            const auto q = decode_query(packet.body);
            if (q.general) {
                on_general_query(from, q);
            } else {
                on_specific_query(from, q);
            }
            break;
        }
        case PacketKind::Renew: {
            std::size_t known = 0;
            for (const auto& qid : decode_strings(packet.body)) {
                if (const auto it = leases_.find(qid); it != leases_.end()) {
                    it->second.renewed = true;
                    ++known;
                }
            }
            trace("LEASE_RENEWED", Fields{{"from", from}, {"queries", known}});
            break;
        }
        case PacketKind::Data: {
            auto m = std::make_shared<const dtps::Message>(dtps::decode_message(packet.body));
            broker().receive(from, m);
            break;
        }
        default:
            break;
    }
}

// ---- queries -------------------------------------------------------------

void SensorNode::on_specific_query(const NodeId& from, const Query& query) {
    if (!seen_queries_.insert(query.id).second) {
        trace("QUERY_DUP", Fields{{"query", query.id}, {"from", from}});
        return;
    }
    handle_query(query);
}

void SensorNode::on_general_query(const NodeId& from, const Query& query) {
    if (!seen_queries_.insert(query.id).second) {
        trace("GOSSIP_DUP", Fields{{"query", query.id}, {"from", from}});
        if (const auto it = pending_gossip_.find(query.id); it != pending_gossip_.end()) {
            it->second.senders.insert(from);
            if (query.hop_ttl > it->second.best.hop_ttl) it->second.best = query;
        }
        return;
    }
    handle_query(query);
    pending_gossip_[query.id] = PendingGossip{query, {from}};
    const auto slot = params().gossip_slot;
    if (slot <= 0) {
        forward_gossip(query.id);
        return;
    }
    // Copies that arrive before the next slot boundary travelled the fewest
    // hops, so the forward uses the largest TTL among them.
    const auto since = std::max<Millis>(now() - query.issued_at, 0);
    const auto boundary = query.issued_at + (since / slot + 1) * slot;
    set_timer(boundary - now(), [this, qid = query.id] { forward_gossip(qid); });
}

void SensorNode::forward_gossip(const std::string& query_id) {
    const auto it = pending_gossip_.find(query_id);
    if (it == pending_gossip_.end()) {
        return;
    }
    const auto pending = std::move(it->second);
    pending_gossip_.erase(it);
    const auto& query = pending.best;
    if (query.hop_ttl <= 0) {
        return;
    }
    std::vector<NodeId> candidates;
    for (const auto& n : live_sensor_neighbors()) {
        if (!pending.senders.contains(n)) {
            candidates.push_back(n);
        }
    }
    if (candidates.empty()) {
        return;
    }
    const auto k = static_cast<std::size_t>(std::max<std::int64_t>(params().fanout, 0));
    Query next = query;
    next.hop_ttl = query.hop_ttl - 1;
    std::string targets;
    for (const auto i : kernel().rng().sample_indices(candidates.size(), k)) {
        send_packet(candidates[i], Packet{PacketKind::Query, encode(next)});
        targets += (targets.empty() ? "" : ",") + candidates[i];
    }
    if (!targets.empty()) {
        trace("GOSSIP_FWD", Fields{{"query", query.id}, {"to", targets}, {"ttl", next.hop_ttl}});
    }
}

void SensorNode::handle_query(const Query& query) {
    if (query.is_continuous()) {
        install_continuous(query);
    } else {
        answer_one_time(query);
    }
}

void SensorNode::answer(const Query& query, std::string json_payload) {
    trace("QUERY_ANSWER", Fields{{"query", query.id}, {"prompt", to_string(query.prompt)}});
    publish(query.reply_topic, std::string_view(json_payload));
}

void SensorNode::ask_user(const Query& query, std::function<void()> on_confirm) {
    if (!profile_.response_delay) {
        trace("USER_IGNORE", Fields{{"query", query.id}, {"prompt", to_string(query.prompt)}});
        return;
    }
    set_timer(*profile_.response_delay, [this, qid = query.id, prompt = query.prompt, fn = std::move(on_confirm)] {
        trace("USER_CONFIRM", Fields{{"query", qid}, {"prompt", to_string(prompt)}});
        fn();
    });
}

void SensorNode::answer_one_time(const Query& query) {
    trace("PROMPT", Fields{{"query", query.id}, {"prompt", to_string(query.prompt)}, {"issuer", query.issuer}});
    if (const auto it = prompt_handlers_.find(query.prompt); it != prompt_handlers_.end()) {
        it->second(query);
        return;
    }
    auto base = [this, &query] {
        Json j;
        j["query"] = query.id;
        j["sensor"] = id();
        j["prompt"] = std::string(to_string(query.prompt));
        return j;
    };
    switch (query.prompt) {
        case PromptTag::Position: {
            auto j = base();
            const auto [x, y] = position();
            j["x"] = x;
            j["y"] = y;
            answer(query, j.dump());
            return;
        }
        case PromptTag::Destination: {
            auto j = base();
            if (profile_.destination) {
                j["destination"] = *profile_.destination;
            } else {
                j["destination"] = nullptr;
            }
            answer(query, j.dump());
            return;
        }
        case PromptTag::CountPersons:
        case PromptTag::TakePhoto:
        case PromptTag::MarkSelfOk: {
            auto j = base();
            if (query.prompt == PromptTag::CountPersons) {
                j["persons"] = profile_.persons_nearby;
            } else if (query.prompt == PromptTag::TakePhoto) {
                j["photo"] = id() + "/photo";
            } else {
                j["ok"] = true;
            }
            ask_user(query, [this, query, payload = j.dump()] { answer(query, payload); });
            return;
        }
    }
}

void SensorNode::install_continuous(const Query& query) {
    cql::QueryAst ast;
    try {
        ast = cql::parse(query.text);
    } catch (const std::exception& e) {
        trace("QUERY_NACK", Fields{{"query", query.id}, {"error", e.what()}});
        Json j;
        j["query"] = query.id;
        j["sensor"] = id();
        j["nack"] = e.what();
        publish(query.reply_topic, std::string_view(j.dump()));
        return;
    }
    const auto qid = query.id;
    const auto reply = query.reply_topic;
    const auto every = ast.every;
    const bool time_window = ast.window == cql::WindowKind::Time;
    const auto stream = ast.stream;
    const auto instance = executor_.install(std::move(ast), now(), [this, qid, reply](cql::InstanceId, const cql::Emission& em) {
        trace("CQ_EMIT", Fields{{"query", qid}, {"n", em.window_count}, {"window_end", em.time.ms()}}.add("value", value_field(em.value)));
        Json j;
        j["query"] = qid;
        j["sensor"] = id();
        j["value"] = value_json(em.value);
        j["n"] = em.window_count;
        j["window_end"] = em.time.ms();
        publish(reply, std::string_view(j.dump()));
    });
    Lease lease;
    lease.query_id = qid;
    lease.instance = instance;
    lease.installed_at = now();
    lease.lease_period = query.lease_period > 0 ? query.lease_period : params().lease_period;
    lease.reply_topic = reply;
    leases_.emplace(qid, std::move(lease));
    trace("QUERY_INSTALL", Fields{{"query", qid}, {"text", query.text}, {"issuer", query.issuer}});
    ensure_sampling(stream);
    if (time_window) {
        arm_tick(qid, every);
    }
}

void SensorNode::arm_tick(const std::string& query_id, Millis every) {
    auto& lease = leases_.at(query_id);
    lease.tick = set_timer(every, [this, query_id, every] {
        const auto it = leases_.find(query_id);
        if (it == leases_.end()) {
            return;
        }
        // Deferred by one zero-delay hop so samples taken at this instant are
        // already in the window.
        set_timer(0, [this, query_id, instance = it->second.instance] {
            if (leases_.contains(query_id)) {
                executor_.tick(instance, now());
            }
        });
        arm_tick(query_id, every);
    });
}

std::vector<std::string> SensorNode::expire_queries() {
    std::vector<std::string> expired;
    for (auto& [qid, lease] : leases_) {
        if (lease.renewed) {
            lease.renewed = false;
            lease.renewals_missed = 0;
            continue;
        }
        ++lease.renewals_missed;
        if (lease.renewals_missed >= params().expiry_threshold) {
            expired.push_back(qid);
        }
    }
    for (const auto& qid : expired) {
        uninstall(qid, "lease");
    }
    return expired;
}

void SensorNode::uninstall(const std::string& query_id, const char* reason) {
    const auto it = leases_.find(query_id);
    if (it == leases_.end()) {
        return;
    }
    if (it->second.tick) {
        cancel_timer(*it->second.tick);
    }
    executor_.uninstall(it->second.instance);
    trace("QUERY_EXPIRED", Fields{{"query", query_id}, {"missed", it->second.renewals_missed}, {"reason", reason}});
    leases_.erase(it);
    stop_unused_sampling();
}

// ---- sampling ------------------------------------------------------------

void SensorNode::ensure_sampling(const std::string& stream) {
    if (samplers_.contains(stream)) {
        return;
    }
    const auto spec = std::find_if(profile_.streams.begin(), profile_.streams.end(),
                                   [&](const StreamSpec& s) { return s.name == stream; });
    if (spec == profile_.streams.end()) {
        trace("NO_STREAM", Fields{{"stream", stream}});
        return;
    }
    trace("SAMPLING_START", Fields{{"stream", stream}});
    const StreamSpec& s = *spec;
    samplers_[stream] = set_timer(s.period, [this, &s] { sample(s); });
}

void SensorNode::sample(const StreamSpec& spec) {
    if (!samplers_.contains(spec.name)) {
        return;
    }
    cql::Sample smp;
    smp.stream = spec.name;
    smp.time = now();
    Fields f{{"stream", spec.name}};
    for (const auto& [name, gen] : spec.fields) {
        cql::Value v;
        switch (gen.kind) {
            case FieldGen::Kind::Const:
                v = gen.a;
                break;
            case FieldGen::Kind::Uniform:
                v = kernel().rng().uniform(gen.a, gen.b);
                break;
            case FieldGen::Kind::IntUniform:
                v = static_cast<double>(
                    kernel().rng().between(static_cast<std::int64_t>(gen.a), static_cast<std::int64_t>(gen.b)));
                break;
            case FieldGen::Kind::Counter: {
                const auto key = spec.name + "." + name;
                const auto it = counters_.try_emplace(key, gen.a).first;
                v = it->second;
                it->second += gen.b;
                break;
            }
            case FieldGen::Kind::Text:
                v = gen.text;
                break;
        }
        f.add(name, value_field(v));
        smp.fields.emplace(name, std::move(v));
    }
    trace("SAMPLE", std::move(f));
    samplers_[spec.name] = set_timer(spec.period, [this, &spec] { sample(spec); });
    for (const auto& [instance, status] : executor_.on_sample(smp)) {
        if (status == cql::SampleStatus::TypeMismatch) {
            for (const auto& [qid, lease] : leases_) {
                if (lease.instance == instance) {
                    trace("SAMPLE_SKIPPED", Fields{{"stream", spec.name}, {"query", qid}});
                }
            }
        }
    }
}

void SensorNode::stop_unused_sampling() {
    for (auto it = samplers_.begin(); it != samplers_.end();) {
        if (executor_.uses_stream(it->first)) {
            ++it;
            continue;
        }
        cancel_timer(it->second);
        trace("SAMPLING_STOP", Fields{{"stream", it->first}});
        it = samplers_.erase(it);
    }
}

// ---- relaying ------------------------------------------------------------

void SensorNode::relay_send(const NodeId& target, const Packet& packet) {
    RelayEnvelope env;
    env.relay_origin = id();
    env.relay_seq = next_relay_seq();
    env.src = id();
    env.dest = target;
    env.hops = 0;
    env.inner = encode(packet);
    seen_relays_.insert(env.id());
    trace("RELAY_SEND", Fields{{"relay", env.id()}, {"dest", target}, {"packet", to_string(packet.kind)}});
    route_relay(env, id());
}

void SensorNode::on_relay(const NodeId& from, RelayEnvelope env) {
    if (!seen_relays_.insert(env.id()).second) {
        trace("RELAY_DUP", Fields{{"relay", env.id()}, {"from", from}});
        return;
    }
    if (env.dest == id()) {
        on_packet(env.src, decode_packet(env.inner));
        return;
    }
    route_relay(env, from);
}

bool SensorNode::route_relay(const RelayEnvelope& env, const NodeId& from) {
    if (env.dest.empty()) {
        const auto fogs = live_fogs();
        if (!fogs.empty()) {
            for (const auto& f : fogs) {
                send_packet(f, Packet{PacketKind::Relay, encode(env)});
            }
            return true;
        }
    }
    if (env.hops + 1 > params().max_relay_hops) {
        trace("RELAY_DROP", Fields{{"relay", env.id()}, {"hops", env.hops}});
        return true;
    }
    RelayEnvelope next = env;
    next.hops = env.hops + 1;
    if (!env.dest.empty() && link_up(env.dest)) {
        send_packet(env.dest, Packet{PacketKind::Relay, encode(next)});
        return true;
    }
    std::vector<NodeId> targets;
    for (const auto& n : live_sensor_neighbors()) {
        if (n != from && n != env.src) {
            targets.push_back(n);
        }
    }
    if (targets.empty()) {
        if (pending_relays_.size() >= static_cast<std::size_t>(params().queue_capacity)) {
            trace("RELAY_QUEUE_DROP", Fields{{"relay", pending_relays_.front().env.id()}});
            pending_relays_.pop_front();
        }
        pending_relays_.push_back(PendingRelay{env, from});
        trace("RELAY_QUEUED", Fields{{"relay", env.id()}});
        return false;
    }
    for (const auto& t : targets) {
        send_packet(t, Packet{PacketKind::Relay, encode(next)});
    }
    trace("RELAY_FWD", Fields{{"relay", env.id()}, {"to", targets.size()}, {"hops", next.hops}});
    return true;
}

void SensorNode::flush_relays() {
    auto pending = std::move(pending_relays_);
    pending_relays_.clear();
    for (auto& p : pending) {
        route_relay(p.env, p.from);
    }
}

}  // namespace fogsense::components
