#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fogsense/dtps/message.hpp"
#include "fogsense/sim/bytes.hpp"
#include "fogsense/sim/kernel.hpp"

namespace fogsense::components {

using sim::Bytes;
using sim::NodeId;

// Packets exchanged between nodes. On the wire a packet is a kind byte
// followed by a kind-specific body, both length-prefixed.
enum class PacketKind : std::uint8_t {
    Data = 1,   // dtps message
    AeDigest,   // ids held in the retained store
    AeRequest,  // ids the sender lacks
    Hello,      // infrastructure peer announcement / heartbeat
    Register,   // sensor registration or keepalive
    Query,
    Renew,      // lease renewal for continuous queries
    Relay,      // sensor relay envelope
    Config,     // cloud-pushed configuration blob
};

std::string_view to_string(PacketKind kind);

struct Packet {
    PacketKind kind = PacketKind::Data;
    Bytes body;
};

Bytes encode(const Packet& p);
Packet decode_packet(std::span<const std::uint8_t> data);

Packet data_packet(const dtps::Message& m);

struct SensorContext {
    double x = 0;
    double y = 0;
    std::vector<NodeId> neighbors;
    std::vector<std::string> topics;  // topics the sensor subscribes to
};

Bytes encode(const SensorContext& c);
SensorContext decode_context(std::span<const std::uint8_t> data);

Bytes encode_ids(const std::vector<dtps::MessageId>& ids);
std::vector<dtps::MessageId> decode_ids(std::span<const std::uint8_t> data);

Bytes encode_strings(const std::vector<std::string>& items);
std::vector<std::string> decode_strings(std::span<const std::uint8_t> data);

/// Sensor relay envelope. `dest` empty means "any fog".
struct RelayEnvelope {
    NodeId relay_origin;
    std::uint64_t relay_seq = 0;
    NodeId src;
    NodeId dest;
    std::int64_t hops = 0;  // sensor-to-sensor transmissions so far
    Bytes inner;            // encoded Packet

    [[nodiscard]] std::string id() const { return relay_origin + "/" + std::to_string(relay_seq); }
};

Bytes encode(const RelayEnvelope& e);
RelayEnvelope decode_relay(std::span<const std::uint8_t> data);

struct ConfigBlob {
    std::string id;
    std::string data;
};

Bytes encode(const ConfigBlob& b);
ConfigBlob decode_config(std::span<const std::uint8_t> data);

}  // namespace fogsense::components
