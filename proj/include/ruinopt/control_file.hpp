#ifndef RUINOPT_CONTROL_FILE_HPP
#define RUINOPT_CONTROL_FILE_HPP

#include "ruinopt/hazard.hpp"
#include "ruinopt/return_model.hpp"
#include "ruinopt/ruin.hpp"

#include <iosfwd>
#include <string>

namespace ruinopt {

/// The 3-line space-delimited control file:
///   line 1: StockMean StockVar BondMean BondVar StockBondCov RFMax ER PrunePwr
///   line 2: PR PAlpha
///   line 3: NumRand Details (0 followed by the fixed horizon in years,
///           otherwise that many "gender age" pairs)
struct ControlConfig {
    ReturnModel model;
    Discretization disc;
    bool random_horizon = false;
    int fixed_years = 0;   // valid when !random_horizon
    MpuSpec mpu;           // valid when random_horizon

    bool operator==(const ControlConfig&) const = default;
};

/// Parse errors carry the line and field position of the offending token.
ControlConfig parse_control(std::istream& in, const std::string& source_name = "control file");
ControlConfig parse_control_file(const std::string& path);

/// Emits the same 3-line grammar; parse_control(emit_control(cfg)) == cfg.
std::string emit_control(const ControlConfig& cfg);

} // namespace ruinopt

#endif
