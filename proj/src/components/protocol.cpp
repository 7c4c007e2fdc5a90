#include "fogsense/components/protocol.hpp"

namespace fogsense::components {

std::string_view to_string(PacketKind kind) {
    switch (kind) {
        case PacketKind::Data: return "DATA";
        case PacketKind::AeDigest: return "AE_DIGEST";
        case PacketKind::AeRequest: return "AE_REQUEST";
        case PacketKind::Hello: return "HELLO";
        case PacketKind::Register: return "REGISTER";
        case PacketKind::Query: return "QUERY";
        case PacketKind::Renew: return "RENEW";
        case PacketKind::Relay: return "RELAY";
        case PacketKind::Config: return "CONFIG";
    }
    return "?";
}

Bytes encode(const Packet& p) {
    sim::ByteWriter w;
    w.u8(static_cast<std::uint8_t>(p.kind)).bytes(p.body);
    return std::move(w).take();
}

Packet decode_packet(std::span<const std::uint8_t> data) {
    sim::ByteReader r(data);
    const auto kind = r.u8();
    if (kind < 1 || kind > static_cast<std::uint8_t>(PacketKind::Config)) {
        throw sim::DecodeError("unknown packet kind " + std::to_string(kind));
    }
    Packet p{static_cast<PacketKind>(kind), r.bytes()};
    if (!r.done()) {
        throw sim::DecodeError("trailing bytes after packet");
    }
    return p;
}

Packet data_packet(const dtps::Message& m) { return Packet{PacketKind::Data, dtps::encode(m)}; }

Bytes encode(const SensorContext& c) {
    sim::ByteWriter w;
    w.f64(c.x).f64(c.y).bytes(encode_strings(c.neighbors)).bytes(encode_strings(c.topics));
    return std::move(w).take();
}

SensorContext decode_context(std::span<const std::uint8_t> data) {
    sim::ByteReader r(data);
    SensorContext c;
    c.x = r.f64();
    c.y = r.f64();
    c.neighbors = decode_strings(r.bytes());
    c.topics = decode_strings(r.bytes());
    return c;
}

Bytes encode_ids(const std::vector<dtps::MessageId>& ids) {
    sim::ByteWriter w;
    w.u64(ids.size());
    for (const auto& id : ids) {
        w.str(id.origin).u64(id.seq);
    }
    return std::move(w).take();
}

std::vector<dtps::MessageId> decode_ids(std::span<const std::uint8_t> data) {
    sim::ByteReader r(data);
    const auto n = r.u64();
    std::vector<dtps::MessageId> ids;
    for (std::uint64_t i = 0; i < n; ++i) {
        dtps::MessageId id;
        id.origin = r.str();
        id.seq = r.u64();
        ids.push_back(std::move(id));
    }
    return ids;
}

Bytes encode_strings(const std::vector<std::string>& items) {
    sim::ByteWriter w;
    w.u64(items.size());
    for (const auto& s : items) {
        w.str(s);
    }
    return std::move(w).take();
}

std::vector<std::string> decode_strings(std::span<const std::uint8_t> data) {
    sim::ByteReader r(data);
    const auto n = r.u64();
    std::vector<std::string> out;
    for (std::uint64_t i = 0; i < n; ++i) {
        out.push_back(r.str());
    }
    return out;
}

Bytes encode(const RelayEnvelope& e) {
    sim::ByteWriter w;
    w.str(e.relay_origin).u64(e.relay_seq).str(e.src).str(e.dest).i64(e.hops).bytes(e.inner);
    return std::move(w).take();
}

RelayEnvelope decode_relay(std::span<const std::uint8_t> data) {
    sim::ByteReader r(data);
    RelayEnvelope e;
    e.relay_origin = r.str();
    e.relay_seq = r.u64();
    e.src = r.str();
    e.dest = r.str();
    e.hops = r.i64();
    e.inner = r.bytes();
    return e;
}

Bytes encode(const ConfigBlob& b) {
    sim::ByteWriter w;
    w.str(b.id).str(b.data);
    return std::move(w).take();
}

ConfigBlob decode_config(std::span<const std::uint8_t> data) {
    sim::ByteReader r(data);
    ConfigBlob b;
    b.id = r.str();
    b.data = r.str();
    return b;
}

}  // namespace fogsense::components
