#include "fogsense/apps/density.hpp"

#include <cmath>
#include <json.hpp>

namespace fogsense::apps {

using components::Fields;

std::int64_t DensityMap::total() const {
    std::int64_t n = 0;
    for (const auto& [sector, c] : counts) {
        n += c;
    }
    return n;
}

std::string DensityMap::str() const {
    std::string out;
    for (const auto& [sector, c] : counts) {
        if (!out.empty()) {
            out += ';';
        }
        out += std::to_string(sector.first) + "," + std::to_string(sector.second) + ":" + std::to_string(c);
    }
    return out;
}

std::pair<std::int64_t, std::int64_t> sector_of(double x, double y, double sector_size) {
    return {static_cast<std::int64_t>(std::floor(x / sector_size)), static_cast<std::int64_t>(std::floor(y / sector_size))};
}

DensityMap build_density_map(const std::vector<std::pair<double, double>>& positions, double sector_size) {
    DensityMap m;
    m.sector_size = sector_size;
    for (const auto& [x, y] : positions) {
        ++m.counts[sector_of(x, y, sector_size)];
    }
    return m;
}

DensityMapApp::DensityMapApp(components::FogNode& fog) : fog_(fog) {}

std::string DensityMapApp::request() {
    return fog_.query_all_sensors(
        components::RequiredAnswers::unbounded(), components::Query::one_time(components::PromptTag::Position),
        [this](const components::GeneralQueryResult& r) {
            std::vector<std::pair<double, double>> positions;
            for (const auto& [sensor, payload] : r.answers) {
                const auto j = nlohmann::json::parse(payload, nullptr, false);
                if (j.is_discarded() || !j.contains("x") || !j.contains("y")) {
                    continue;
                }
                positions.emplace_back(j["x"].get<double>(), j["y"].get<double>());
            }
            auto map = build_density_map(positions, fog_.params().sector_size);
            map.as_of = r.closed_at;
            fog_.trace("DENSITY_MAP", Fields{{"query", r.query_id},
                                             {"sensors", positions.size()},
                                             {"total", map.total()},
                                             {"sector_size", map.sector_size},
                                             {"map", map.str()}});
            latest_ = std::move(map);
        });
}

}  // namespace fogsense::apps
