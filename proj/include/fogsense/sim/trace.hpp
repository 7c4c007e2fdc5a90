#pragma once

#include <concepts>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "fogsense/sim/time.hpp"

namespace fogsense::sim {

using FieldValue = std::variant<std::int64_t, double, std::string, bool>;

/// One observable simulation event. Field order is insertion order and is
/// preserved through serialization.
struct TraceRecord {
    SimTime time;
    std::uint64_t seq = 0;
    std::string node;
    std::string kind;
    std::vector<std::pair<std::string, FieldValue>> fields;

    [[nodiscard]] const FieldValue* find(std::string_view key) const;
    [[nodiscard]] std::string str(std::string_view key) const;
    [[nodiscard]] std::int64_t integer(std::string_view key) const;
    [[nodiscard]] double number(std::string_view key) const;
    [[nodiscard]] bool flag(std::string_view key) const;
    [[nodiscard]] bool has(std::string_view key) const { return find(key) != nullptr; }

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// Implicit conversion target for Fields literals: any integer becomes
/// int64, floating point becomes double.
struct FieldArg {
    FieldValue value;

    template <std::integral T>
        requires(!std::same_as<T, bool>)
    FieldArg(T v) : value(static_cast<std::int64_t>(v)) {}  // NOLINT
    FieldArg(bool v) : value(v) {}                           // NOLINT
    FieldArg(double v) : value(v) {}                         // NOLINT
    FieldArg(std::string v) : value(std::move(v)) {}         // NOLINT
    FieldArg(std::string_view v) : value(std::string(v)) {}  // NOLINT
    FieldArg(const char* v) : value(std::string(v)) {}       // NOLINT
};

/// Small builder so call sites read as `Fields{{"msg", id}, {"topic", t}}`.
class Fields {
public:
    Fields() = default;
    Fields(std::initializer_list<std::pair<std::string, FieldArg>> init) {
        for (const auto& [k, v] : init) {
            items_.emplace_back(k, v.value);
        }
    }

    Fields& add(std::string key, FieldValue value) {
        items_.emplace_back(std::move(key), std::move(value));
        return *this;
    }
    Fields& add(std::string key, int value) { return add(std::move(key), FieldValue{std::int64_t{value}}); }
    Fields& add(std::string key, std::size_t value) {
        return add(std::move(key), FieldValue{static_cast<std::int64_t>(value)});
    }
    Fields& add(std::string key, const char* value) { return add(std::move(key), FieldValue{std::string{value}}); }

    std::vector<std::pair<std::string, FieldValue>> release() && { return std::move(items_); }

private:
    std::vector<std::pair<std::string, FieldValue>> items_;
};

/// Accumulates trace records; the kernel owns one and stamps time and seq.
class Tracer {
public:
    using Observer = std::function<void(const TraceRecord&)>;

    void set_observer(Observer observer) { observer_ = std::move(observer); }

    const TraceRecord& emit(SimTime time, std::string node, std::string kind, Fields fields);

    /// Moves out everything recorded since the last drain.
    std::vector<TraceRecord> drain();

    [[nodiscard]] std::uint64_t next_seq() const { return next_seq_; }

private:
    std::vector<TraceRecord> pending_;
    std::uint64_t next_seq_ = 0;
    Observer observer_;
};

}  // namespace fogsense::sim
