#include "fogsense/sim/kernel.hpp"

#include <algorithm>

namespace fogsense::sim {

std::string_view to_string(Role role) {
    switch (role) {
        case Role::Cloud: return "cloud";
        case Role::Fog: return "fog";
        case Role::Sensor: return "sensor";
    }
    return "?";
}

std::optional<Role> parse_role(std::string_view text) {
    if (text == "cloud") return Role::Cloud;
    if (text == "fog") return Role::Fog;
    if (text == "sensor") return Role::Sensor;
    return std::nullopt;
}

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::Start: return "START";
        case EventKind::Timer: return "TIMER";
        case EventKind::Receive: return "RECEIVE";
        case EventKind::LinkUp: return "LINK_UP";
        case EventKind::LinkDown: return "LINK_DOWN";
    }
    return "?";
}

Delivery decode_delivery(const Event& event) {
    ByteReader r(event.payload);
    Delivery d;
    d.from = r.str();
    d.data = r.bytes();
    return d;
}

NodeId decode_link_peer(const Event& event) {
    ByteReader r(event.payload);
    return r.str();
}

Kernel::Kernel(std::uint64_t seed) : rng_(seed) {}

void Kernel::add_node(const NodeId& id, Role role) {
    if (started_) {
        throw std::logic_error("cannot add nodes after the simulation started");
    }
    if (!roles_.emplace(id, role).second) {
        throw std::invalid_argument("duplicate node id: " + id);
    }
    order_.push_back(id);
    adjacency_[id];
}

void Kernel::add_link(Link link) {
    if (started_) {
        throw std::logic_error("cannot add links after the simulation started");
    }
    if (!has_node(link.a)) throw UnknownNode(link.a);
    if (!has_node(link.b)) throw UnknownNode(link.b);
    if (link.a == link.b) {
        throw std::invalid_argument("self link on " + link.a);
    }
    if (link.latency < 0) {
        throw std::invalid_argument("negative latency on link " + link.a + "-" + link.b);
    }
    for (std::size_t i = 0; i < link.up.size(); ++i) {
        const auto& iv = link.up[i];
        if (iv.start.ms() < 0 || iv.end <= iv.start) {
            throw std::invalid_argument("empty or negative interval on link " + link.a + "-" + link.b);
        }
        if (i > 0 && link.up[i - 1].end > iv.start) {
            throw std::invalid_argument("overlapping or unsorted intervals on link " + link.a + "-" + link.b);
        }
    }
    auto k = key(link.a, link.b);
    if (links_.contains(k)) {
        throw std::invalid_argument("duplicate link " + k.first + "-" + k.second);
    }
    auto insert_sorted = [](std::vector<NodeId>& v, const NodeId& id) {
        v.insert(std::lower_bound(v.begin(), v.end(), id), id);
    };
    insert_sorted(adjacency_[link.a], link.b);
    insert_sorted(adjacency_[link.b], link.a);
    links_.emplace(std::move(k), std::move(link));
}

void Kernel::attach(const NodeId& id, EventHandler* handler) {
    if (!has_node(id)) throw UnknownNode(id);
    handlers_[id] = handler;
}

EventHandle Kernel::enqueue(SimTime at, const NodeId& target, EventKind kind, Bytes payload) {
    Event e;
    e.fire_time = at;
    e.sequence = next_sequence_++;
    e.target = target;
    e.kind = kind;
    e.payload = std::move(payload);
    live_.insert(e.sequence);
    const auto handle = e.sequence;
    queue_.push(std::move(e));
    return handle;
}

EventHandle Kernel::schedule(const NodeId& target, EventKind kind, Bytes payload, Millis delay) {
    if (delay < 0) {
        throw std::invalid_argument("negative delay");
    }
    if (finished_) {
        throw std::logic_error("simulation already finished");
    }
    if (!has_node(target)) throw UnknownNode(target);
    return enqueue(now_ + delay, target, kind, std::move(payload));
}

bool Kernel::cancel(EventHandle handle) {
    if (live_.erase(handle) == 0) {
        return false;
    }
    cancelled_.insert(handle);
    return true;
}

SendOutcome Kernel::send(const NodeId& from, const NodeId& to, Bytes payload) {
    if (!has_node(from)) throw UnknownNode(from);
    if (!has_node(to)) throw UnknownNode(to);
    if (from == to) {
        throw std::invalid_argument("send to self: " + from);
    }
    const auto size = static_cast<std::int64_t>(payload.size());
    if (link_state(from, to, now_) == LinkState::Down) {
        trace(from, "SEND", Fields{{"to", to}, {"bytes", size}, {"outcome", std::string("no-link")}});
        return SendOutcome::NoLink;
    }
    const auto lat = *latency(from, to);
    ByteWriter w;
    w.str(from).bytes(payload);
    trace(from, "SEND", Fields{{"to", to}, {"bytes", size}, {"outcome", std::string("accepted")}});
    schedule(to, EventKind::Receive, std::move(w).take(), lat);
    return SendOutcome::Accepted;
}

LinkState Kernel::link_state(const NodeId& a, const NodeId& b, SimTime at) const {
    const auto it = links_.find(key(a, b));
    if (it == links_.end()) {
        return LinkState::Down;
    }
    const auto& up = it->second.up;
    // First interval whose end is beyond `at`; intervals are sorted and disjoint.
    const auto iv = std::upper_bound(up.begin(), up.end(), at,
                                     [](SimTime t, const Interval& x) { return t < x.end; });
    return (iv != up.end() && iv->contains(at)) ? LinkState::Up : LinkState::Down;
}

std::optional<Millis> Kernel::latency(const NodeId& a, const NodeId& b) const {
    const auto it = links_.find(key(a, b));
    if (it == links_.end()) {
        return std::nullopt;
    }
    return it->second.latency;
}

const std::vector<NodeId>& Kernel::neighbors(const NodeId& id) const {
    const auto it = adjacency_.find(id);
    if (it == adjacency_.end()) throw UnknownNode(id);
    return it->second;
}

Role Kernel::role(const NodeId& id) const {
    const auto it = roles_.find(id);
    if (it == roles_.end()) throw UnknownNode(id);
    return it->second;
}

void Kernel::start() {
    started_ = true;
    for (const auto& id : order_) {
        enqueue(SimTime{0}, id, EventKind::Start, {});
    }
    for (const auto& [k, link] : links_) {
        for (const auto& iv : link.up) {
            ByteWriter to_a;
            to_a.str(k.second);
            ByteWriter to_b;
            to_b.str(k.first);
            enqueue(iv.start, k.first, EventKind::LinkUp, std::move(to_a).take());
            enqueue(iv.start, k.second, EventKind::LinkUp, std::move(to_b).take());
            ByteWriter down;
            down.str(k.second);
            enqueue(iv.end, k.first, EventKind::LinkDown, std::move(down).take());
        }
    }
}

void Kernel::dispatch(const Event& event) {
    switch (event.kind) {
        case EventKind::LinkUp: {
            const auto peer = decode_link_peer(event);
            if (event.target < peer) {
                trace(event.target, "LINK", Fields{{"peer", peer}, {"state", std::string("up")}});
            }
            break;
        }
        case EventKind::LinkDown:
            trace(event.target, "LINK", Fields{{"peer", decode_link_peer(event)}, {"state", std::string("down")}});
            return;  // endpoints learn about outages only through failed sends
        case EventKind::Receive: {
            ByteReader r(event.payload);
            const auto from = r.str();
            const auto size = static_cast<std::int64_t>(r.bytes().size());
            trace(event.target, "RECV", Fields{{"from", from}, {"bytes", size}});
            break;
        }
        default:
            break;
    }
    const auto it = handlers_.find(event.target);
    if (it != handlers_.end() && it->second != nullptr) {
        it->second->handle(event);
    }
}

std::vector<TraceRecord> Kernel::run_until(SimTime until) {
    if (until < now_) {
        throw std::invalid_argument("run_until: time is in the past");
    }
    if (!started_) {
        start();
    }
    while (!queue_.empty() && queue_.top().fire_time < until) {
        Event event = queue_.top();
        queue_.pop();
        if (cancelled_.erase(event.sequence) > 0) {
            continue;
        }
        live_.erase(event.sequence);
        now_ = event.fire_time;
        dispatch(event);
    }
    now_ = until;
    return tracer_.drain();
}

}  // namespace fogsense::sim
