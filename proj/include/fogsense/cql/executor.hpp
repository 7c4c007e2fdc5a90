#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fogsense/cql/ast.hpp"
#include "fogsense/sim/time.hpp"

namespace fogsense::cql {

using sim::SimTime;

struct Sample {
    std::string stream;
    SimTime time;
    std::map<std::string, Value> fields;
};

struct Emission {
    SimTime time;
    Value value;
    /// Number of samples in the window the value was computed over.
    std::size_t window_count = 0;
};

enum class SampleStatus : std::uint8_t { Admitted, Filtered, TypeMismatch, OtherStream };

struct SampleResult {
    SampleStatus status = SampleStatus::OtherStream;
    std::optional<Emission> emission;
};

/// One running query: window state plus the aggregate over it.
///
/// COUNT windows emit synchronously on every `every`-th admitted sample.
/// TIME windows emit only when driven by on_tick() at installed_at + k*every;
/// samples must be fed in non-decreasing time order and all samples with
/// time <= T must be fed before the tick at T.
class WindowedAggregate {
public:
    struct Entry {
        SimTime time;
        std::uint64_t index = 0;  // admission order
        Value value;
    };

    /// Throws SemanticError for an invalid AST.
    WindowedAggregate(QueryAst ast, SimTime installed_at);

    SampleResult on_sample(const Sample& sample);
    std::optional<Emission> on_tick(SimTime now);

    [[nodiscard]] const QueryAst& ast() const { return ast_; }
    [[nodiscard]] const std::deque<Entry>& window() const { return window_; }
    [[nodiscard]] SimTime next_tick() const { return next_tick_; }
    [[nodiscard]] std::uint64_t admitted() const { return admitted_; }

private:
    std::optional<Emission> emit(SimTime at);
    void evict_front();
    void push_extrema(const Entry& e);

    QueryAst ast_;
    SimTime next_tick_;
    std::uint64_t admitted_ = 0;
    std::deque<Entry> window_;
    // Monotonic deques of admission indices for MIN/MAX.
    std::deque<Entry> min_candidates_;
    std::deque<Entry> max_candidates_;
};

using InstanceId = std::uint64_t;
using EmitCallback = std::function<void(InstanceId, const Emission&)>;

/// Holds every query instance installed on one sensor.
class Executor {
public:
    InstanceId install(QueryAst ast, SimTime now, EmitCallback emit);
    bool uninstall(InstanceId id);

    /// Feeds a sample to every instance reading its stream. Returns the
    /// per-instance status for instances of that stream.
    std::vector<std::pair<InstanceId, SampleStatus>> on_sample(const Sample& sample);

    /// Drives a TIME-window instance's emission at `now`.
    void tick(InstanceId id, SimTime now);

    [[nodiscard]] const WindowedAggregate* find(InstanceId id) const;
    [[nodiscard]] bool uses_stream(const std::string& stream) const;
    [[nodiscard]] std::size_t size() const { return instances_.size(); }

private:
    struct Installed {
        WindowedAggregate query;
        EmitCallback emit;
    };
    InstanceId next_ = 1;
    std::map<InstanceId, Installed> instances_;
};

}  // namespace fogsense::cql
