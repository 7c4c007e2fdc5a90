#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fogsense/sim/time.hpp"

namespace fogsense::components {

/// Every tunable the runtime uses, in one table. Scenario files and
/// `--param k=v` override these by key.
struct Params {
    std::int64_t fanout = 2;                  // gossip targets per forwarding sensor
    std::int64_t hop_ttl = 4;                 // gossip hops for general queries
    sim::Millis gossip_slot = 100;            // gossip forwards happen on slot boundaries; keep above link latency
    sim::Millis lease_period = 5000;          // continuous-query lease and keepalive period
    std::int64_t expiry_threshold = 3;        // missed renewals/heartbeats before expiry
    std::int64_t max_relay_hops = 2;          // sensor-to-sensor transmissions per relayed packet
    sim::Millis anti_entropy_interval = 10000;
    std::int64_t queue_capacity = 1024;       // per-neighbor outbound queue
    sim::Millis deadline_ms = 30000;          // general-query deadline
    double sector_size = 100.0;               // density map sector edge, meters
    sim::Millis retain_ttl = 0;               // retained-store TTL; 0 keeps forever
    sim::Millis default_latency = 10;         // links that omit latency_ms

    /// Sets one parameter from text. Returns an error message on failure.
    std::optional<std::string> set(std::string_view key, std::string_view value);

    /// Consistency checks; returns one message per problem.
    [[nodiscard]] std::vector<std::string> problems() const;

    static const std::vector<std::string>& keys();
};

}  // namespace fogsense::components
