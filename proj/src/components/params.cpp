#include "fogsense/components/params.hpp"

#include <charconv>
#include <cmath>

namespace fogsense::components {

namespace {

template <typename T>
std::optional<std::string> parse_into(std::string_view key, std::string_view text, T& out) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        return "param " + std::string(key) + ": cannot parse '" + std::string(text) + "'";
    }
    out = value;
    return std::nullopt;
}

}  // namespace

const std::vector<std::string>& Params::keys() {
    static const std::vector<std::string> k = {
        "fanout",       "hop_ttl",        "gossip_slot",   "lease_period", "expiry_threshold", "max_relay_hops", "anti_entropy_interval",
        "queue_capacity", "deadline_ms", "sector_size",  "retain_ttl",       "default_latency",
    };
    return k;
}

std::optional<std::string> Params::set(std::string_view key, std::string_view value) {
    if (key == "fanout") return parse_into(key, value, fanout);
    if (key == "hop_ttl") return parse_into(key, value, hop_ttl);
    if (key == "gossip_slot") return parse_into(key, value, gossip_slot);
    if (key == "lease_period") return parse_into(key, value, lease_period);
    if (key == "expiry_threshold") return parse_into(key, value, expiry_threshold);
    if (key == "max_relay_hops") return parse_into(key, value, max_relay_hops);
    if (key == "anti_entropy_interval") return parse_into(key, value, anti_entropy_interval);
    if (key == "queue_capacity") return parse_into(key, value, queue_capacity);
    if (key == "deadline_ms") return parse_into(key, value, deadline_ms);
    if (key == "sector_size") return parse_into(key, value, sector_size);
    if (key == "retain_ttl") return parse_into(key, value, retain_ttl);
    if (key == "default_latency") return parse_into(key, value, default_latency);
    return "unknown param '" + std::string(key) + "'";
}

std::vector<std::string> Params::problems() const {
    std::vector<std::string> out;
    if (fanout < 0) out.emplace_back("param fanout must be >= 0");
    if (hop_ttl < 0) out.emplace_back("param hop_ttl must be >= 0");
    if (gossip_slot < 0) out.emplace_back("param gossip_slot must be >= 0");
    if (lease_period <= 0) out.emplace_back("param lease_period must be > 0");
    if (expiry_threshold <= 0) out.emplace_back("param expiry_threshold must be > 0");
    if (max_relay_hops < 0) out.emplace_back("param max_relay_hops must be >= 0");
    if (anti_entropy_interval <= 0) out.emplace_back("param anti_entropy_interval must be > 0");
    if (queue_capacity <= 0) out.emplace_back("param queue_capacity must be > 0");
    if (deadline_ms <= 0) out.emplace_back("param deadline_ms must be > 0");
    if (!(sector_size > 0) || !std::isfinite(sector_size)) out.emplace_back("param sector_size must be > 0");
    if (retain_ttl < 0) out.emplace_back("param retain_ttl must be >= 0");
    if (default_latency < 0) out.emplace_back("param default_latency must be >= 0");
    return out;
}

}  // namespace fogsense::components
