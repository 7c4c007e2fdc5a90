#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "fogsense/sim/bytes.hpp"
#include "fogsense/sim/kernel.hpp"

namespace fogsense::components {

using sim::Bytes;
using sim::Millis;
using sim::NodeId;
using sim::SimTime;

/// One-time prompts a sensor can be asked to handle.
enum class PromptTag : std::uint8_t { MarkSelfOk, TakePhoto, CountPersons, Position, Destination };

std::string_view to_string(PromptTag tag);
std::optional<PromptTag> parse_prompt(std::string_view text);

/// Prompts that need a human to act (and therefore go through the
/// simulated user model).
bool is_manual(PromptTag tag);

/// Number of answers a general query waits for; UNBOUNDED never closes
/// early and is resolved only by the deadline.
class RequiredAnswers {
public:
    static RequiredAnswers unbounded() { return RequiredAnswers{0, true}; }
    /// Throws std::invalid_argument for zero.
    static RequiredAnswers exactly(std::uint64_t n);

    [[nodiscard]] bool is_unbounded() const { return unbounded_; }
    [[nodiscard]] std::uint64_t count() const { return count_; }
    [[nodiscard]] bool met_by(std::size_t answers) const { return !unbounded_ && answers >= count_; }
    [[nodiscard]] std::string str() const { return unbounded_ ? "UNBOUNDED" : std::to_string(count_); }

    friend bool operator==(const RequiredAnswers&, const RequiredAnswers&) = default;

private:
    RequiredAnswers(std::uint64_t n, bool unbounded) : count_(n), unbounded_(unbounded) {}
    std::uint64_t count_;
    bool unbounded_;
};

struct Query {
    enum class Kind : std::uint8_t { Continuous, OneTime };

    std::string id;
    Kind kind = Kind::OneTime;
    std::string text;  // continuous: query text
    PromptTag prompt = PromptTag::MarkSelfOk;
    std::string reply_topic;
    RequiredAnswers required = RequiredAnswers::exactly(1);
    std::int64_t hop_ttl = 0;
    Millis lease_period = 0;  // continuous only
    NodeId issuer;
    bool general = false;
    SimTime issued_at{0};  // when the fog sent it; gossip slots count from here

    static Query one_time(PromptTag tag);
    static Query continuous(std::string text);

    [[nodiscard]] bool is_continuous() const { return kind == Kind::Continuous; }

    friend bool operator==(const Query&, const Query&) = default;
};

Bytes encode(const Query& q);
Query decode_query(std::span<const std::uint8_t> data);

}  // namespace fogsense::components
