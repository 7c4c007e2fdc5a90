#include "fogsense/dtps/broker.hpp"

#include <algorithm>

namespace fogsense::dtps {

using sim::Fields;

Broker::Broker(NodeId self, sim::Kernel& kernel, BrokerHost& host, BrokerConfig config)
    : self_(std::move(self)), kernel_(kernel), host_(host), config_(config) {}

SubscriptionId Broker::subscribe(const Topic& topic, const std::string& handler_name, Handler handler) {
    for (const auto& s : subscriptions_) {
        if (s.topic == topic && s.name == handler_name) {
            return s.id;
        }
    }
    const auto id = next_sub_++;
    subscriptions_.push_back(Subscription{id, topic, handler_name, std::move(handler)});
    return id;
}

std::vector<std::string> Broker::topics() const {
    std::set<std::string> names;
    for (const auto& s : subscriptions_) {
        names.insert(s.topic.name());
    }
    return {names.begin(), names.end()};
}

MessageId Broker::publish(const Topic& topic, Bytes payload) {
    auto m = std::make_shared<Message>(
        Message{MessageId{self_, next_seq_++}, topic, std::move(payload), kernel_.now()});
    kernel_.trace(self_, "PUBLISH",
                  Fields{{"msg", m->id.str()}, {"topic", topic.name()}, {"payload", m->payload_text()}});
    const MessagePtr shared = std::move(m);
    accept(nullptr, shared);
    return shared->id;
}

void Broker::receive(const NodeId& from, const MessagePtr& message) {
    kernel_.trace(self_, "MSG_RECV", Fields{{"msg", message->id.str()}, {"topic", message->topic.name()}, {"from", from}});
    if (seen_.contains(message->id)) {
        kernel_.trace(self_, "DUP", Fields{{"msg", message->id.str()}, {"from", from}});
        return;
    }
    accept(&from, message);
}

void Broker::accept(const NodeId* from, const MessagePtr& message) {
    seen_.insert(message->id);
    if (config_.retain) {
        store_.emplace(message->id, message);
    }
    deliver_locally(*message);
    if (from != nullptr && !config_.forward_received) {
        return;
    }
    for (const auto& neighbor : host_.routes_for(*message)) {
        if (from != nullptr && neighbor == *from) {
            continue;
        }
        if (neighbor == message->id.origin && neighbor != self_) {
            continue;
        }
        enqueue(neighbor, message);
    }
}

void Broker::deliver_locally(const Message& message) {
    // Handlers may subscribe or publish; iterate over a snapshot.
    std::vector<const Subscription*> matching;
    for (const auto& s : subscriptions_) {
        if (s.topic == message.topic) {
            matching.push_back(&s);
        }
    }
    std::vector<std::pair<std::string, Handler>> calls;
    calls.reserve(matching.size());
    for (const auto* s : matching) {
        calls.emplace_back(s->name, s->handler);
    }
    for (auto& [name, handler] : calls) {
        kernel_.trace(self_, "DELIVER",
                      Fields{{"msg", message.id.str()},
                             {"topic", message.topic.name()},
                             {"handler", name},
                             {"created", message.created_at.ms()}});
        handler(message);
    }
}

void Broker::enqueue(const NodeId& neighbor, const MessagePtr& message) {
    auto& q = queues_[neighbor];
    q.push_back(message);
    while (q.size() > config_.queue_capacity) {
        kernel_.trace(self_, "QUEUE_DROP", Fields{{"msg", q.front()->id.str()}, {"neighbor", neighbor}});
        q.pop_front();
    }
    flush(neighbor);
}

void Broker::flush(const NodeId& neighbor) {
    const auto it = queues_.find(neighbor);
    if (it == queues_.end()) {
        return;
    }
    auto& q = it->second;
    while (!q.empty()) {
        if (host_.transmit(neighbor, *q.front()) == sim::SendOutcome::NoLink) {
            break;
        }
        q.pop_front();
    }
}

void Broker::flush_all() {
    std::vector<NodeId> keys;
    for (const auto& [k, q] : queues_) {
        if (!q.empty()) {
            keys.push_back(k);
        }
    }
    for (const auto& k : keys) {
        flush(k);
    }
}

void Broker::drop_queue(const NodeId& neighbor) { queues_.erase(neighbor); }

std::size_t Broker::queue_length(const NodeId& neighbor) const {
    const auto it = queues_.find(neighbor);
    return it == queues_.end() ? 0 : it->second.size();
}

void Broker::prune() {
    if (config_.retain_ttl <= 0) {
        return;
    }
    const auto now = kernel_.now();
    std::erase_if(store_, [&](const auto& kv) { return now - kv.second->created_at > config_.retain_ttl; });
}

std::vector<MessageId> Broker::digest() {
    prune();
    std::vector<MessageId> ids;
    ids.reserve(store_.size());
    for (const auto& [id, m] : store_) {
        ids.push_back(id);
    }
    return ids;
}

Reconciliation Broker::reconcile(const std::vector<MessageId>& peer_ids) {
    prune();
    Reconciliation r;
    const std::set<MessageId> theirs(peer_ids.begin(), peer_ids.end());
    for (const auto& id : theirs) {
        // A message already processed here (even if expired from the store)
        // is never requested again.
        if (!seen_.contains(id)) {
            r.want.push_back(id);
        }
    }
    for (const auto& [id, m] : store_) {
        if (!theirs.contains(id)) {
            r.push.push_back(m);
        }
    }
    return r;
}

std::vector<MessagePtr> Broker::lookup(const std::vector<MessageId>& ids) const {
    std::vector<MessagePtr> out;
    for (const auto& id : ids) {
        if (const auto it = store_.find(id); it != store_.end()) {
            out.push_back(it->second);
        }
    }
    return out;
}

}  // namespace fogsense::dtps
