#include "fogsense/scenario/trace_io.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "fogsense/dtps/message.hpp"

namespace fogsense::scenario {

using Json = nlohmann::ordered_json;

namespace {

const std::set<std::string> kReserved = {"time", "seq", "node", "kind"};

}  // namespace

std::string to_json_line(const sim::TraceRecord& r) {
    Json j;
    j["time"] = r.time.ms();
    j["seq"] = r.seq;
    j["node"] = r.node;
    j["kind"] = r.kind;
    for (const auto& [k, v] : r.fields) {
        if (kReserved.contains(k)) {
            throw std::logic_error("trace field name '" + k + "' is reserved");
        }
        std::visit([&j, &k](const auto& x) { j[k] = x; }, v);
    }
    return j.dump();
}

void write_trace(std::ostream& out, const std::vector<sim::TraceRecord>& records) {
    for (const auto& r : records) {
        out << to_json_line(r) << '\n';
    }
}

std::vector<sim::TraceRecord> read_trace(std::istream& in) {
    std::vector<sim::TraceRecord> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) {
            continue;
        }
        const auto j = Json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw TraceFormatError(n, "not a JSON object");
        }
        sim::TraceRecord r;
        try {
            r.time = sim::SimTime{j.at("time").get<std::int64_t>()};
            r.seq = j.at("seq").get<std::uint64_t>();
            r.node = j.at("node").get<std::string>();
            r.kind = j.at("kind").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw TraceFormatError(n, std::string("missing or mistyped time/seq/node/kind: ") + e.what());
        }
        for (const auto& [k, v] : j.items()) {
            if (kReserved.contains(k)) continue;
            if (v.is_boolean()) {
                r.fields.emplace_back(k, v.get<bool>());
            } else if (v.is_number_integer()) {
                r.fields.emplace_back(k, v.get<std::int64_t>());
            } else if (v.is_number()) {
                r.fields.emplace_back(k, v.get<double>());
            } else if (v.is_string()) {
                r.fields.emplace_back(k, v.get<std::string>());
            } else {
                throw TraceFormatError(n, "field '" + k + "' is not a scalar");
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

Json summarize(const std::vector<sim::TraceRecord>& records) {
    std::map<std::string, std::int64_t> published;
    std::map<std::string, std::int64_t> delivered;
    std::vector<std::int64_t> latencies;
    std::int64_t dups = 0;
    std::set<std::string> fogs;
    std::map<std::string, std::set<std::string>> safe_at;  // phone -> fogs
    std::int64_t displays = 0;
    std::int64_t density_maps = 0;
    std::int64_t density_last_total = 0;
    std::int64_t density_last_sensors = 0;
    std::int64_t visited = 0;
    std::set<std::int64_t> stops;
    std::int64_t uploads = 0;
    std::int64_t raw = 0;
    std::int64_t uploaded = 0;
    std::int64_t closed = 0;
    std::int64_t partial = 0;

    for (const auto& r : records) {
        if (r.kind == "NODE" && r.str("role") == "fog") {
            fogs.insert(r.node);
        } else if (r.kind == "PUBLISH") {
            ++published[r.str("topic")];
        } else if (r.kind == "DELIVER") {
            ++delivered[r.str("topic")];
            if (dtps::MessageId::parse(r.str("msg")).origin != r.node) {
                latencies.push_back(r.time.ms() - r.integer("created"));
            }
        } else if (r.kind == "DUP") {
            ++dups;
        } else if (r.kind == "SAFE_ADD") {
            safe_at[r.str("phone")].insert(r.node);
        } else if (r.kind == "DISPLAY" && r.str("what") == "SAFE") {
            ++displays;
        } else if (r.kind == "DENSITY_MAP") {
            ++density_maps;
            density_last_total = r.integer("total");
            density_last_sensors = r.integer("sensors");
        } else if (r.kind == "VISITED") {
            ++visited;
            stops.insert(r.integer("stop"));
        } else if (r.kind == "UPLOAD") {
            ++uploads;
            // Each upload is a cumulative snapshot; report the latest.
            raw = r.integer("raw_samples");
            uploaded = r.integer("records");
        } else if (r.kind == "QUERY_CLOSED") {
            ++closed;
            if (r.flag("partial")) ++partial;
        }
    }

    std::int64_t known_everywhere = 0;
    for (const auto& [phone, at] : safe_at) {
        if (!fogs.empty() && at.size() == fogs.size()) ++known_everywhere;
    }

    Json out;
    out["records"] = records.size();
    Json topics = Json::object();
    std::set<std::string> names;
    for (const auto& [t, n] : published) names.insert(t);
    for (const auto& [t, n] : delivered) names.insert(t);
    for (const auto& t : names) {
        topics[t] = Json{{"published", published[t]}, {"delivered", delivered[t]}};
    }
    out["topics"] = std::move(topics);

    Json lat;
    lat["samples"] = latencies.size();
    if (latencies.empty()) {
        lat["min"] = 0;
        lat["median"] = 0;
        lat["max"] = 0;
    } else {
        std::sort(latencies.begin(), latencies.end());
        const auto n = latencies.size();
        lat["min"] = latencies.front();
        // Lower median for even counts keeps the value an observed latency.
        lat["median"] = latencies[(n - 1) / 2];
        lat["max"] = latencies.back();
    }
    out["delivery_latency_ms"] = std::move(lat);
    out["duplicates_suppressed"] = dups;
    out["general_queries"] = Json{{"closed", closed}, {"partial", partial}};

    Json apps;
    apps["safe_numbers_known_at_all_fogs"] = known_everywhere;
    apps["safe_numbers_known_anywhere"] = safe_at.size();
    apps["display_safe"] = displays;
    apps["density_maps"] = density_maps;
    apps["density_last_total"] = density_last_total;
    apps["density_last_sensors"] = density_last_sensors;
    apps["stops_visited"] = visited;
    apps["distinct_stops_visited"] = stops.size();
    apps["mule_uploads"] = uploads;
    apps["mule_raw_samples"] = raw;
    apps["mule_records_uploaded"] = uploaded;
    apps["mule_compression_ratio"] = uploaded > 0 ? static_cast<double>(raw) / static_cast<double>(uploaded) : 0.0;
    out["apps"] = std::move(apps);
    return out;
}

}  // namespace fogsense::scenario
