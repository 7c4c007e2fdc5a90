#include "fogsense/components/query.hpp"

#include <stdexcept>

namespace fogsense::components {

std::string_view to_string(PromptTag tag) {
    switch (tag) {
        case PromptTag::MarkSelfOk: return "MARK_SELF_OK";
        case PromptTag::TakePhoto: return "TAKE_PHOTO";
        case PromptTag::CountPersons: return "COUNT_PERSONS";
        case PromptTag::Position: return "POSITION";
        case PromptTag::Destination: return "DESTINATION";
    }
    return "?";
}

std::optional<PromptTag> parse_prompt(std::string_view text) {
    for (auto tag : {PromptTag::MarkSelfOk, PromptTag::TakePhoto, PromptTag::CountPersons, PromptTag::Position,
                     PromptTag::Destination}) {
        if (to_string(tag) == text) {
            return tag;
        }
    }
    return std::nullopt;
}

bool is_manual(PromptTag tag) {
    return tag == PromptTag::MarkSelfOk || tag == PromptTag::TakePhoto || tag == PromptTag::CountPersons;
}

RequiredAnswers RequiredAnswers::exactly(std::uint64_t n) {
    if (n == 0) {
        throw std::invalid_argument("required answers must be positive");
    }
    return RequiredAnswers{n, false};
}

Query Query::one_time(PromptTag tag) {
    Query q;
    q.kind = Kind::OneTime;
    q.prompt = tag;
    return q;
}

Query Query::continuous(std::string text) {
    Query q;
    q.kind = Kind::Continuous;
    q.text = std::move(text);
    return q;
}

Bytes encode(const Query& q) {
    sim::ByteWriter w;
    w.str(q.id)
        .u8(static_cast<std::uint8_t>(q.kind))
        .str(q.text)
        .u8(static_cast<std::uint8_t>(q.prompt))
        .str(q.reply_topic)
        .u8(q.required.is_unbounded() ? 1 : 0)
        .u64(q.required.count())
        .i64(q.hop_ttl)
        .i64(q.lease_period)
        .str(q.issuer)
        .u8(q.general ? 1 : 0)
        .i64(q.issued_at.ms());
    return std::move(w).take();
}

Query decode_query(std::span<const std::uint8_t> data) {
    sim::ByteReader r(data);
    Query q;
    q.id = r.str();
    const auto kind = r.u8();
    if (kind > 1) throw sim::DecodeError("bad query kind");
    q.kind = static_cast<Query::Kind>(kind);
    q.text = r.str();
    const auto prompt = r.u8();
    if (prompt > static_cast<std::uint8_t>(PromptTag::Destination)) throw sim::DecodeError("bad prompt tag");
    q.prompt = static_cast<PromptTag>(prompt);
    q.reply_topic = r.str();
    const bool unbounded = r.u8() != 0;
    const auto count = r.u64();
    if (unbounded) {
        q.required = RequiredAnswers::unbounded();
    } else if (count == 0) {
        throw sim::DecodeError("zero required answers");
    } else {
        q.required = RequiredAnswers::exactly(count);
    }
    q.hop_ttl = r.i64();
    q.lease_period = r.i64();
    q.issuer = r.str();
    q.general = r.u8() != 0;
    q.issued_at = SimTime{r.i64()};
    return q;
}

}  // namespace fogsense::components
