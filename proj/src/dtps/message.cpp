#include "fogsense/dtps/message.hpp"

#include <charconv>
#include <stdexcept>

namespace fogsense::dtps {

Topic::Topic(std::string name) : name_(std::move(name)) {
    if (name_.empty()) {
        throw std::invalid_argument("topic name must not be empty");
    }
}

std::string MessageId::str() const { return origin + "#" + std::to_string(seq); }

MessageId MessageId::parse(std::string_view text) {
    const auto hash = text.rfind('#');
    if (hash == std::string_view::npos || hash == 0) {
        throw std::invalid_argument("malformed message id: " + std::string(text));
    }
    MessageId id;
    id.origin = std::string(text.substr(0, hash));
    const auto digits = text.substr(hash + 1);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id.seq);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
        throw std::invalid_argument("malformed message id: " + std::string(text));
    }
    return id;
}

Bytes to_bytes(std::string_view text) { return {text.begin(), text.end()}; }

Bytes encode(const Message& m) {
    sim::ByteWriter w;
    w.str(m.id.origin).u64(m.id.seq).str(m.topic.name()).i64(m.created_at.ms()).bytes(m.payload);
    return std::move(w).take();
}

Message decode_message(std::span<const std::uint8_t> data) {
    sim::ByteReader r(data);
    MessageId id;
    id.origin = r.str();
    id.seq = r.u64();
    auto topic = r.str();
    if (topic.empty()) {
        throw sim::DecodeError("empty topic on the wire");
    }
    const auto created = r.i64();
    auto payload = r.bytes();
    if (!r.done()) {
        throw sim::DecodeError("trailing bytes after message");
    }
    return Message{std::move(id), Topic{std::move(topic)}, std::move(payload), SimTime{created}};
}

}  // namespace fogsense::dtps
