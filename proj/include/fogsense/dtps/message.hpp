#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "fogsense/sim/bytes.hpp"
#include "fogsense/sim/kernel.hpp"
#include "fogsense/sim/time.hpp"

namespace fogsense::dtps {

using sim::Bytes;
using sim::NodeId;
using sim::SimTime;

/// Exact-match topic name; never empty.
class Topic {
public:
    explicit Topic(std::string name);

    [[nodiscard]] const std::string& name() const { return name_; }
    auto operator<=>(const Topic&) const = default;

private:
    std::string name_;
};

struct MessageId {
    NodeId origin;
    std::uint64_t seq = 0;

    auto operator<=>(const MessageId&) const = default;

    /// "origin#seq"
    [[nodiscard]] std::string str() const;
    static MessageId parse(std::string_view text);
};

struct Message {
    MessageId id;
    Topic topic;
    Bytes payload;
    SimTime created_at;

    [[nodiscard]] std::string payload_text() const { return {payload.begin(), payload.end()}; }
};

using MessagePtr = std::shared_ptr<const Message>;

Bytes to_bytes(std::string_view text);

/// Wire layout: length-prefixed fields in the order
/// origin, sequence, topic, created_at, payload (see docs/wire-format.md).
Bytes encode(const Message& m);
Message decode_message(std::span<const std::uint8_t> data);

}  // namespace fogsense::dtps
