#include "fogsense/sim/trace.hpp"

#include <stdexcept>

namespace fogsense::sim {

const FieldValue* TraceRecord::find(std::string_view key) const {
    for (const auto& [k, v] : fields) {
        if (k == key) {
            return &v;
        }
    }
    return nullptr;
}

std::string TraceRecord::str(std::string_view key) const {
    const auto* v = find(key);
    if (v == nullptr) {
        throw std::out_of_range("trace field missing: " + std::string(key));
    }
    if (const auto* s = std::get_if<std::string>(v)) {
        return *s;
    }
    if (const auto* i = std::get_if<std::int64_t>(v)) {
        return std::to_string(*i);
    }
    throw std::invalid_argument("trace field is not a string: " + std::string(key));
}

std::int64_t TraceRecord::integer(std::string_view key) const {
    const auto* v = find(key);
    if (v == nullptr) {
        throw std::out_of_range("trace field missing: " + std::string(key));
    }
    if (const auto* i = std::get_if<std::int64_t>(v)) {
        return *i;
    }
    if (const auto* d = std::get_if<double>(v)) {
        return static_cast<std::int64_t>(*d);
    }
    throw std::invalid_argument("trace field is not an integer: " + std::string(key));
}

double TraceRecord::number(std::string_view key) const {
    const auto* v = find(key);
    if (v == nullptr) {
        throw std::out_of_range("trace field missing: " + std::string(key));
    }
    if (const auto* d = std::get_if<double>(v)) {
        return *d;
    }
    if (const auto* i = std::get_if<std::int64_t>(v)) {
        return static_cast<double>(*i);
    }
    throw std::invalid_argument("trace field is not numeric: " + std::string(key));
}

bool TraceRecord::flag(std::string_view key) const {
    const auto* v = find(key);
    if (v == nullptr) {
        return false;
    }
    if (const auto* b = std::get_if<bool>(v)) {
        return *b;
    }
    throw std::invalid_argument("trace field is not a bool: " + std::string(key));
}

const TraceRecord& Tracer::emit(SimTime time, std::string node, std::string kind, Fields fields) {
    auto& rec = pending_.emplace_back();
    rec.time = time;
    rec.seq = next_seq_++;
    rec.node = std::move(node);
    rec.kind = std::move(kind);
    rec.fields = std::move(fields).release();
    if (observer_) {
        observer_(rec);
    }
    return rec;
}

std::vector<TraceRecord> Tracer::drain() {
    std::vector<TraceRecord> out;
    out.swap(pending_);
    return out;
}

}  // namespace fogsense::sim
