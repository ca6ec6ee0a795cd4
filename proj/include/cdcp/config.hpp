#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cdcp/model.hpp"
#include "cdcp/pricing.hpp"

namespace cdcp {

// One run = one JSON file. Cross-field constraints are re-validated on load;
// the fully resolved config (defaults filled) is echoed into every output.
struct RunConfig {
    PhysicalModel model;
    EsscherParams esscher;
    std::size_t grid_points = 2000;

    double t = 1.0;
    double dt_max = 0.1;
    std::size_t n_paths = 10000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::vector<double> retentions = {0.0, 25.0, 38.15, 50.0, 75.0, 100.0};
    std::optional<SweepSpec> sweep;
    std::string out_dir = ".";
    std::string format = "csv";  // csv | json

    void validate() const;  // throws ConfigInvalid naming the violated constraint
    std::string resolved_json() const;
};

RunConfig parse_config(const std::string& json_text);
RunConfig default_config();

JumpDist jump_dist_from_json(const std::string& json_text);

}  // namespace cdcp
