#include "fogsense/components/node.hpp"

namespace fogsense::components {

Node::Node(NodeId id, Role role, sim::Kernel& kernel, const Params& params, dtps::BrokerConfig broker_config)
    : id_(std::move(id)), role_(role), kernel_(kernel), params_(params), broker_(id_, kernel, *this, broker_config) {
    kernel_.attach(id_, this);
}

dtps::MessageId Node::publish(const std::string& topic, Bytes payload) {
    return broker_.publish(dtps::Topic{topic}, std::move(payload));
}

dtps::SubscriptionId Node::subscribe(const std::string& topic, const std::string& handler_name, dtps::Handler handler) {
    return broker_.subscribe(dtps::Topic{topic}, handler_name, std::move(handler));
}

TimerId Node::set_timer(sim::Millis delay, std::function<void()> fn) {
    const auto id = next_timer_++;
    sim::ByteWriter w;
    w.u64(id);
    const auto handle = kernel_.schedule(id_, sim::EventKind::Timer, std::move(w).take(), delay);
    timers_.emplace(id, std::make_pair(handle, std::move(fn)));
    return id;
}

void Node::cancel_timer(TimerId id) {
    const auto it = timers_.find(id);
    if (it == timers_.end()) {
        return;
    }
    kernel_.cancel(it->second.first);
    timers_.erase(it);
}

void Node::every(sim::Millis period, std::function<void()> fn) {
    every_again(period, std::make_shared<std::function<void()>>(std::move(fn)));
}

void Node::every_again(sim::Millis period, const std::shared_ptr<std::function<void()>>& fn) {
    set_timer(period, [this, period, fn] {
        (*fn)();
        every_again(period, fn);
    });
}

void Node::handle(const sim::Event& event) {
    switch (event.kind) {
        case sim::EventKind::Start:
            on_start();
            for (auto& hook : start_hooks_) {
                hook();
            }
            break;
        case sim::EventKind::Timer: {
            sim::ByteReader r(event.payload);
            const auto id = r.u64();
            const auto it = timers_.find(id);
            if (it == timers_.end()) {
                return;
            }
            auto fn = std::move(it->second.second);
            timers_.erase(it);
            fn();
            break;
        }
        case sim::EventKind::Receive: {
            auto delivery = sim::decode_delivery(event);
            on_packet(delivery.from, decode_packet(delivery.data));
            break;
        }
        case sim::EventKind::LinkUp:
            on_link_up(sim::decode_link_peer(event));
            break;
        case sim::EventKind::LinkDown:
            break;
    }
}

sim::SendOutcome Node::send_packet(const NodeId& to, const Packet& packet) {
    return kernel_.send(id_, to, encode(packet));
}

std::vector<NodeId> Node::declared_neighbors(Role role) const {
    std::vector<NodeId> out;
    for (const auto& n : kernel_.neighbors(id_)) {
        if (kernel_.role(n) == role) {
            out.push_back(n);
        }
    }
    return out;
}

}  // namespace fogsense::components
