#include "fogsense/apps/mule.hpp"

#include <algorithm>
#include <map>
#include <json.hpp>

namespace fogsense::apps {

using components::Fields;
using Json = nlohmann::ordered_json;

namespace {

std::string_view part_name(MuleBuffer::Part p) {
    switch (p) {
        case MuleBuffer::Part::Count: return "COUNT";
        case MuleBuffer::Part::Sum: return "SUM";
        case MuleBuffer::Part::Min: return "MIN";
        case MuleBuffer::Part::Max: return "MAX";
    }
    return "?";
}

}  // namespace

void MuleBuffer::fold(const NodeId& site, const std::string& metric, Part part, double value, sim::SimTime window_end) {
    auto& r = records_[{site, metric}];
    switch (part) {
        case Part::Count: r.count += static_cast<std::int64_t>(value); break;
        case Part::Sum: r.sum += value; break;
        case Part::Min: r.min = std::min(r.min, value); break;
        case Part::Max: r.max = std::max(r.max, value); break;
    }
    r.last_time = std::max(r.last_time, window_end);
}

// Samples, not values: a stream row carrying several metrics counts once.
std::int64_t MuleBuffer::raw_samples() const {
    std::map<NodeId, std::int64_t> per_site;
    for (const auto& [key, r] : records_) {
        auto& n = per_site[key.first];
        n = std::max(n, r.count);
    }
    std::int64_t n = 0;
    for (const auto& [site, c] : per_site) {
        n += c;
    }
    return n;
}

std::string MuleBuffer::to_json() const {
    Json arr = Json::array();
    for (const auto& [key, r] : records_) {
        Json j;
        j["site"] = key.first;
        j["metric"] = key.second;
        j["count"] = r.count;
        j["sum"] = r.sum;
        if (r.count > 0) {
            j["min"] = r.min;
            j["max"] = r.max;
        }
        j["last_time"] = r.last_time.ms();
        arr.push_back(std::move(j));
    }
    return arr.dump();
}

DataMuleApp::DataMuleApp(components::FogNode& fog, MuleConfig config) : fog_(fog), config_(std::move(config)) {
    fog_.on_sensor_connection([this](const NodeId& site) { collect(site); });
    fog_.on_cloud_connection([this](const NodeId& cloud) { upload(cloud); });
}

void DataMuleApp::collect(const NodeId& site) {
    const auto w = std::to_string(config_.window_ms);
    for (const auto& metric : config_.metrics) {
        for (const auto part : {MuleBuffer::Part::Count, MuleBuffer::Part::Sum, MuleBuffer::Part::Min, MuleBuffer::Part::Max}) {
            const auto text = "SELECT " + std::string(part_name(part)) + "(" + metric + ") FROM " + config_.stream +
                              " WINDOW TIME " + w + " EVERY " + w;
            fog_.query_specific_sensor(site, components::Query::continuous(text),
                                       [this, site, metric, part](const dtps::Message& m) {
                                           const auto j = nlohmann::json::parse(m.payload_text(), nullptr, false);
                                           if (j.is_discarded() || !j.contains("value") || !j["value"].is_number()) {
                                               return;
                                           }
                                           const auto value = j["value"].get<double>();
                                           const sim::SimTime end{j["window_end"].get<std::int64_t>()};
                                           buffer_.fold(site, metric, part, value, end);
                                           fog_.trace("MULE_FOLD", Fields{{"site", site},
                                                                          {"metric", metric},
                                                                          {"agg", part_name(part)},
                                                                          {"value", value},
                                                                          {"window_end", end.ms()},
                                                                          {"window", config_.window_ms}});
                                       });
        }
    }
}

void DataMuleApp::upload(const NodeId& cloud) {
    if (buffer_.records().empty()) {
        fog_.trace("UPLOAD", Fields{{"cloud", cloud}, {"records", 0}, {"raw_samples", 0}, {"bytes", 0}});
        return;
    }
    const auto payload = buffer_.to_json();
    fog_.trace("UPLOAD", Fields{{"cloud", cloud},
                                {"records", buffer_.records().size()},
                                {"raw_samples", buffer_.raw_samples()},
                                {"bytes", payload.size()}});
    fog_.publish(kMuleTopic, std::string_view(payload));
}

}  // namespace fogsense::apps
