#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fogsense/sim/bytes.hpp"
#include "fogsense/sim/rng.hpp"
#include "fogsense/sim/time.hpp"
#include "fogsense/sim/trace.hpp"

namespace fogsense::sim {

using NodeId = std::string;

enum class Role : std::uint8_t { Cloud, Fog, Sensor };

std::string_view to_string(Role role);
std::optional<Role> parse_role(std::string_view text);

/// Half-open interval [start, end) during which a link is up.
struct Interval {
    SimTime start;
    SimTime end;

    [[nodiscard]] bool contains(SimTime t) const { return start <= t && t < end; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

struct Link {
    NodeId a;
    NodeId b;
    Millis latency = 0;
    std::vector<Interval> up;
};

enum class EventKind : std::uint8_t { Start, Timer, Receive, LinkUp, LinkDown };

std::string_view to_string(EventKind kind);

struct Event {
    SimTime fire_time;
    std::uint64_t sequence = 0;
    NodeId target;
    EventKind kind = EventKind::Timer;
    Bytes payload;
};

using EventHandle = std::uint64_t;

enum class SendOutcome : std::uint8_t { Accepted, NoLink };
enum class LinkState : std::uint8_t { Up, Down };

class UnknownNode : public std::invalid_argument {
public:
    explicit UnknownNode(const NodeId& id) : std::invalid_argument("unknown node: " + id) {}
};

class EventHandler {
public:
    virtual ~EventHandler() = default;
    virtual void handle(const Event& event) = 0;
};

/// Decoded RECEIVE payload: who sent it and the transported bytes.
struct Delivery {
    NodeId from;
    Bytes data;
};
Delivery decode_delivery(const Event& event);

/// Decoded LINK_UP / LINK_DOWN payload.
NodeId decode_link_peer(const Event& event);

class Kernel {
public:
    explicit Kernel(std::uint64_t seed);

    Kernel(const Kernel&) = delete;
    Kernel& operator=(const Kernel&) = delete;

    void add_node(const NodeId& id, Role role);
    void add_link(Link link);
    void attach(const NodeId& id, EventHandler* handler);

    /// Schedules an event at now+delay. The returned handle is the event's
    /// sequence number.
    EventHandle schedule(const NodeId& target, EventKind kind, Bytes payload, Millis delay);
    bool cancel(EventHandle handle);

    SendOutcome send(const NodeId& from, const NodeId& to, Bytes payload);

    /// Executes every event with fire_time < until, then sets the clock to
    /// `until`. Returns the trace produced by this call.
    std::vector<TraceRecord> run_until(SimTime until);

    /// Pure function of the declared schedule; unknown pairs are down.
    [[nodiscard]] LinkState link_state(const NodeId& a, const NodeId& b, SimTime at) const;
    [[nodiscard]] bool link_up_now(const NodeId& a, const NodeId& b) const {
        return link_state(a, b, now_) == LinkState::Up;
    }
    [[nodiscard]] std::optional<Millis> latency(const NodeId& a, const NodeId& b) const;

    /// Declared link peers of `id`, sorted by id.
    [[nodiscard]] const std::vector<NodeId>& neighbors(const NodeId& id) const;

    [[nodiscard]] bool has_node(const NodeId& id) const { return roles_.contains(id); }
    [[nodiscard]] Role role(const NodeId& id) const;
    [[nodiscard]] const std::vector<NodeId>& nodes() const { return order_; }

    [[nodiscard]] SimTime now() const { return now_; }
    Rng& rng() { return rng_; }
    Tracer& tracer() { return tracer_; }

    void trace(const NodeId& node, std::string kind, Fields fields = {}) {
        tracer_.emit(now_, node, std::move(kind), std::move(fields));
    }

    /// After finish() no further events may be scheduled.
    void finish() { finished_ = true; }
    [[nodiscard]] bool finished() const { return finished_; }

    [[nodiscard]] std::size_t pending_events() const { return queue_.size() - cancelled_.size(); }

private:
    struct Later {
        bool operator()(const Event& x, const Event& y) const {
            if (x.fire_time != y.fire_time) {
                return x.fire_time > y.fire_time;
            }
            return x.sequence > y.sequence;
        }
    };

    static std::pair<NodeId, NodeId> key(const NodeId& a, const NodeId& b) {
        return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    }

    void start();
    void dispatch(const Event& event);
    EventHandle enqueue(SimTime at, const NodeId& target, EventKind kind, Bytes payload);

    SimTime now_{};
    std::uint64_t next_sequence_ = 0;
    bool started_ = false;
    bool finished_ = false;
    Rng rng_;
    Tracer tracer_;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::set<EventHandle> cancelled_;
    std::set<EventHandle> live_;
    std::vector<NodeId> order_;
    std::unordered_map<NodeId, Role> roles_;
    std::unordered_map<NodeId, EventHandler*> handlers_;
    std::map<std::pair<NodeId, NodeId>, Link> links_;
    std::unordered_map<NodeId, std::vector<NodeId>> adjacency_;
};

}  // namespace fogsense::sim
