#pragma once

#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fogsense/components/fog.hpp"

namespace fogsense::apps {

using components::NodeId;

inline const std::string kMuleTopic = "MULE";

struct MuleRecord {
    std::int64_t count = 0;
    double sum = 0;
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
    sim::SimTime last_time;
};

/// Aggregated readings keyed by (site, metric). Size is bounded by
/// sites x metrics no matter how many raw samples were folded in.
class MuleBuffer {
public:
    enum class Part : std::uint8_t { Count, Sum, Min, Max };

    void fold(const NodeId& site, const std::string& metric, Part part, double value, sim::SimTime window_end);

    [[nodiscard]] const std::map<std::pair<NodeId, std::string>, MuleRecord>& records() const { return records_; }
    [[nodiscard]] std::int64_t raw_samples() const;
    [[nodiscard]] std::string to_json() const;

private:
    std::map<std::pair<NodeId, std::string>, MuleRecord> records_;
};

struct MuleConfig {
    std::string stream;
    std::vector<std::string> metrics;
    sim::Millis window_ms = 10000;  // tumbling window of the on-site queries
};

/// A mobile fog that installs aggregation queries on every site sensor it
/// meets, folds the results into a MuleBuffer, and uploads the buffer each
/// time it reaches the cloud. The buffer is cumulative, so each upload is a
/// complete snapshot of everything collected so far.
class DataMuleApp {
public:
    DataMuleApp(components::FogNode& fog, MuleConfig config);

    [[nodiscard]] const MuleBuffer& buffer() const { return buffer_; }

private:
    void collect(const NodeId& site);
    void upload(const NodeId& cloud);

    components::FogNode& fog_;
    MuleConfig config_;
    MuleBuffer buffer_;
};

}  // namespace fogsense::apps
