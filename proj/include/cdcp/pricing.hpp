#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cdcp/esscher.hpp"
#include "cdcp/model.hpp"
#include "cdcp/simulate.hpp"

namespace cdcp {

struct PremiumEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    double ci_lo = 0.0;  // value - 1.96 stderr
    double ci_hi = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    Measure measure = Measure::P;
    double retention = 0.0;
    double horizon = 0.0;
};

struct McSettings {
    std::size_t n_paths = 10000;
    std::uint64_t seed = 1;
    double dt_max = 0.1;
    unsigned threads = 0;  // 0 = hardware concurrency
};

using SimModel = std::variant<PhysicalModel, TiltedModel>;

// Terminal aggregate claims C_T for paths indexed 0..n-1, one RNG stream per
// path index (common random numbers across any later reuse of the same seed).
// Deterministic for fixed (model, T, settings) regardless of thread count.
std::vector<double> simulate_terminal_claims(const SimModel& model, double t,
                                             const McSettings& s);

PremiumEstimate stop_loss_premium(const SimModel& model, Measure measure,
                                  double retention, double t,
                                  const McSettings& s);

// One estimate per retention from a single common set of paths.
std::vector<PremiumEstimate> premium_table(const SimModel& model,
                                           Measure measure,
                                           const std::vector<double>& retentions,
                                           double t, const McSettings& s);

enum class SweepParam { Theta, Psi, Nu, Retention };

struct SweepRow {
    double param_value = 0.0;
    bool skipped = false;
    std::string skip_reason;
    double analytic = 0.0;           // tilted-mean quadrature E*[C_t]
    PremiumEstimate mc_mean;         // MC estimate of E*[C_t]
    PremiumEstimate mc_stop_loss;    // MC estimate of E*[(C_t - L)^+]
};

struct SweepSpec {
    SweepParam param = SweepParam::Theta;
    std::vector<double> values;
    double stop_loss_retention = 25.0;
};

// Re-solves the B curve per swept value; invalid values (tilt outside
// (-gamma, 0], infeasible regime) are reported as skipped rows, not errors.
std::vector<SweepRow> sensitivity_sweep(const PhysicalModel& m,
                                        const EsscherParams& base,
                                        const SweepSpec& spec, double t,
                                        std::size_t bcurve_grid,
                                        const McSettings& s);

SweepParam sweep_param_from_string(const std::string& name);
std::string sweep_param_name(SweepParam p);

}  // namespace cdcp
