#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fogsense/components/fog.hpp"

namespace fogsense::apps {

using components::NodeId;

struct DensityMap {
    double sector_size = 0;
    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> counts;
    sim::SimTime as_of;

    [[nodiscard]] std::int64_t total() const;
    /// "sx,sy:n;..." in ascending sector order; empty map gives "".
    [[nodiscard]] std::string str() const;
};

/// Sector of a point: (floor(x / size), floor(y / size)).
std::pair<std::int64_t, std::int64_t> sector_of(double x, double y, double sector_size);

DensityMap build_density_map(const std::vector<std::pair<double, double>>& positions, double sector_size);

/// Builds density maps from POSITION answers gathered with an unbounded
/// general query.
class DensityMapApp {
public:
    explicit DensityMapApp(components::FogNode& fog);

    /// Issues the query now; the map is traced when the query closes.
    std::string request();

    [[nodiscard]] const std::optional<DensityMap>& latest() const { return latest_; }

private:
    components::FogNode& fog_;
    std::optional<DensityMap> latest_;
};

}  // namespace fogsense::apps
