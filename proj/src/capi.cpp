#include "cdcp.h"

#include <algorithm>
#include <cstring>
#include <memory>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "cdcp/config.hpp"
#include "cdcp/errors.hpp"
#include "cdcp/moments.hpp"
#include "cdcp/pricing.hpp"
#include "cdcp/simulate.hpp"
#include "cdcp/validate.hpp"
#include "cdcp/version.hpp"

struct cdcp_table {
    std::vector<std::string> col_names;
    std::vector<std::string> row_labels;  // empty when unlabelled
    std::vector<double> data;             // row-major
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;

    void set_cols(std::vector<std::string> names) {
        col_names = std::move(names);
        n_cols = col_names.size();
    }
    void add_row(std::initializer_list<double> row, std::string label = {}) {
        data.insert(data.end(), row.begin(), row.end());
        if (!label.empty() || !row_labels.empty()) {
            row_labels.resize(n_rows);
            row_labels.push_back(std::move(label));
        }
        ++n_rows;
    }
};

struct cdcp_engine {
    cdcp::RunConfig cfg;
    std::string resolved;
    std::string last_error;
    std::optional<cdcp::BCurve> bcurve;
    std::optional<cdcp::KCurve> kcurve;
    std::optional<cdcp::TiltedModel> tilted;

    const cdcp::BCurve& ensure_bcurve() {
        if (!bcurve)
            bcurve = cdcp::solve_B(cfg.model, cfg.esscher, cfg.t, cfg.grid_points);
        return *bcurve;
    }
    const cdcp::KCurve& ensure_kcurve() {
        ensure_bcurve();
        if (!kcurve) kcurve = cdcp::solve_K(cfg.model, cfg.esscher, *bcurve);
        return *kcurve;
    }
    const cdcp::TiltedModel& ensure_tilted() {
        if (!tilted)
            tilted = cdcp::tilt_model(cfg.model, cfg.esscher, ensure_bcurve());
        return *tilted;
    }
    cdcp::McSettings mc() const {
        return {cfg.n_paths, cfg.seed, cfg.dt_max, cfg.threads};
    }
};

namespace {

thread_local std::string g_create_error;

cdcp_status status_of(const cdcp::Error& e) {
    switch (e.exit_class()) {
        case 2: return CDCP_ERR_CONFIG;
        case 3: return CDCP_ERR_REGIME;
        default: return CDCP_ERR_NUMERIC;
    }
}

template <typename F>
cdcp_status guarded(cdcp_engine* engine, F&& f) {
    if (!engine) return CDCP_ERR_ARGUMENT;
    try {
        f();
        engine->last_error.clear();
        return CDCP_OK;
    } catch (const cdcp::Error& e) {
        engine->last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        engine->last_error = e.what();
        return CDCP_ERR_INTERNAL;
    }
}

cdcp::Measure to_measure(cdcp_measure m) {
    return m == CDCP_MEASURE_P ? cdcp::Measure::P : cdcp::Measure::Pstar;
}

cdcp::SimModel sim_model_for(cdcp_engine* engine, cdcp_measure measure) {
    if (measure == CDCP_MEASURE_P) return cdcp::SimModel{engine->cfg.model};
    return cdcp::SimModel{engine->ensure_tilted()};
}

}  // namespace

extern "C" {

const char* cdcp_version(void) { return cdcp::kVersion; }

const char* cdcp_status_name(cdcp_status status) {
    switch (status) {
        case CDCP_OK: return "ok";
        case CDCP_ERR_CONFIG: return "config-invalid";
        case CDCP_ERR_REGIME: return "regime-infeasible";
        case CDCP_ERR_NUMERIC: return "numerical-failure";
        case CDCP_ERR_ARGUMENT: return "bad-argument";
        case CDCP_ERR_INTERNAL: return "internal-error";
    }
    return "unknown";
}

cdcp_status cdcp_engine_create(const char* config_json, cdcp_engine** out) {
    if (!out) return CDCP_ERR_ARGUMENT;
    *out = nullptr;
    try {
        auto engine = new cdcp_engine{};
        engine->cfg = config_json && std::strlen(config_json) > 0
                          ? cdcp::parse_config(config_json)
                          : cdcp::default_config();
        engine->resolved = engine->cfg.resolved_json();
        *out = engine;
        g_create_error.clear();
        return CDCP_OK;
    } catch (const cdcp::Error& e) {
        g_create_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        g_create_error = e.what();
        return CDCP_ERR_INTERNAL;
    }
}

void cdcp_engine_free(cdcp_engine* engine) { delete engine; }

const char* cdcp_last_create_error(void) { return g_create_error.c_str(); }

const char* cdcp_engine_last_error(const cdcp_engine* engine) {
    return engine ? engine->last_error.c_str() : "null engine";
}

const char* cdcp_engine_resolved_config(cdcp_engine* engine) {
    return engine ? engine->resolved.c_str() : "";
}

cdcp_status cdcp_bcurve(cdcp_engine* engine, cdcp_table** out) {
    if (!out) return CDCP_ERR_ARGUMENT;
    return guarded(engine, [&] {
        const auto& bc = engine->ensure_bcurve();
        const auto& kc = engine->ensure_kcurve();
        auto* t = new cdcp_table;
        t->set_cols({"t", "B", "K"});
        for (std::size_t i = 0; i < bc.grid.size(); ++i)
            t->add_row({bc.grid[i], bc.values[i], kc.values[i]});
        *out = t;
    });
}

cdcp_status cdcp_moments(cdcp_engine* engine, cdcp_measure measure,
                         const double* ts, size_t n_ts, cdcp_table** out) {
    if (!out || (!ts && n_ts > 0)) return CDCP_ERR_ARGUMENT;
    return guarded(engine, [&] {
        auto t = std::make_unique<cdcp_table>();
        t->set_cols({"t", "mean_lambda", "mean_N", "mean_C"});
        for (size_t i = 0; i < n_ts; ++i) {
            cdcp::MomentReport r =
                measure == CDCP_MEASURE_P
                    ? cdcp::moments_P(ts[i], engine->cfg.model)
                    : cdcp::moments_star(ts[i], engine->ensure_tilted());
            t->add_row({r.t, r.mean_lambda, r.mean_N, r.mean_C});
        }
        *out = t.release();
    });
}

cdcp_status cdcp_mean_c_star(cdcp_engine* engine, double t, double* out) {
    if (!out) return CDCP_ERR_ARGUMENT;
    return guarded(engine, [&] {
        *out = cdcp::mean_C_star(t, engine->ensure_tilted());
    });
}

cdcp_status cdcp_price(cdcp_engine* engine, cdcp_measure measure,
                       cdcp_table** out) {
    if (!out) return CDCP_ERR_ARGUMENT;
    return guarded(engine, [&] {
        auto estimates = cdcp::premium_table(
            sim_model_for(engine, measure), to_measure(measure),
            engine->cfg.retentions, engine->cfg.t, engine->mc());
        auto* t = new cdcp_table;
        t->set_cols({"L", "estimate", "stderr", "ci_lo", "ci_hi"});
        for (const auto& est : estimates)
            t->add_row({est.retention, est.value, est.stderr_, est.ci_lo, est.ci_hi});
        *out = t;
    });
}

cdcp_status cdcp_sweep(cdcp_engine* engine, cdcp_table** out) {
    if (!out) return CDCP_ERR_ARGUMENT;
    return guarded(engine, [&] {
        if (!engine->cfg.sweep)
            cdcp::fail(cdcp::ErrorCode::ConfigInvalid,
                       "config has no run.sweep block");
        auto rows = cdcp::sensitivity_sweep(
            engine->cfg.model, engine->cfg.esscher, *engine->cfg.sweep,
            engine->cfg.t, engine->cfg.grid_points, engine->mc());
        auto* t = new cdcp_table;
        t->set_cols({"param_value", "skipped", "analytic", "mc", "mc_stderr",
                     "mc_lo", "mc_hi", "sl", "sl_stderr", "sl_lo", "sl_hi"});
        for (const auto& r : rows) {
            if (r.skipped) {
                t->add_row({r.param_value, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
                            0.0, 0.0, 0.0},
                           r.skip_reason);
            } else {
                t->add_row({r.param_value, 0.0, r.analytic, r.mc_mean.value,
                            r.mc_mean.stderr_, r.mc_mean.ci_lo, r.mc_mean.ci_hi,
                            r.mc_stop_loss.value, r.mc_stop_loss.stderr_,
                            r.mc_stop_loss.ci_lo, r.mc_stop_loss.ci_hi});
            }
        }
        *out = t;
    });
}

cdcp_status cdcp_simulate_events(cdcp_engine* engine, cdcp_measure measure,
                                 size_t n_paths, cdcp_table** out) {
    if (!out || n_paths == 0) return CDCP_ERR_ARGUMENT;
    return guarded(engine, [&] {
        auto model = sim_model_for(engine, measure);
        auto t = std::make_unique<cdcp_table>();
        t->set_cols({"path_id", "event_type", "time", "mark", "claim"});
        for (size_t i = 0; i < n_paths; ++i) {
            cdcp::RngStream rng(engine->cfg.seed, i);
            cdcp::SimPath p = std::visit(
                [&](const auto& m) {
                    return cdcp::simulate_cdcp(m, engine->cfg.t,
                                               engine->cfg.dt_max, rng);
                },
                model);
            std::size_t ie = 0, is = 0;
            while (ie < p.external_events.size() || is < p.self_events.size()) {
                const bool take_ext =
                    is >= p.self_events.size() ||
                    (ie < p.external_events.size() &&
                     p.external_events[ie].time <= p.self_events[is].time);
                if (take_ext) {
                    const auto& ev = p.external_events[ie++];
                    t->add_row({static_cast<double>(i), 0.0, ev.time, ev.mark, 0.0});
                } else {
                    const auto& ev = p.self_events[is++];
                    t->add_row({static_cast<double>(i), 1.0, ev.time,
                                ev.intensity_mark, ev.claim_mark});
                }
            }
        }
        *out = t.release();
    });
}

cdcp_status cdcp_trajectories(cdcp_engine* engine, cdcp_measure measure,
                              size_t n_paths, size_t n_samples,
                              cdcp_table** out) {
    if (!out || n_paths == 0 || n_samples < 2) return CDCP_ERR_ARGUMENT;
    return guarded(engine, [&] {
        auto model = sim_model_for(engine, measure);
        auto t = std::make_unique<cdcp_table>();
        t->set_cols({"path_id", "t", "lambda", "C"});
        for (size_t i = 0; i < n_paths; ++i) {
            cdcp::RngStream rng(engine->cfg.seed, i);
            cdcp::SimPath p = std::visit(
                [&](const auto& m) {
                    return cdcp::simulate_cdcp(m, engine->cfg.t,
                                               engine->cfg.dt_max, rng);
                },
                model);
            for (size_t k = 0; k < n_samples; ++k) {
                const double tk = engine->cfg.t * static_cast<double>(k) /
                                  static_cast<double>(n_samples - 1);
                t->add_row({static_cast<double>(i), tk, p.lambda_at(tk),
                            p.C_at(tk)});
            }
        }
        *out = t.release();
    });
}

cdcp_status cdcp_validate(cdcp_engine* engine, cdcp_table** out,
                          int* all_pass) {
    if (!out) return CDCP_ERR_ARGUMENT;
    return guarded(engine, [&] {
        auto checks = cdcp::run_validation(engine->cfg);
        auto* t = new cdcp_table;
        t->set_cols({"pass", "value", "reference", "tolerance"});
        bool ok = true;
        for (const auto& c : checks) {
            t->add_row({c.pass ? 1.0 : 0.0, c.value, c.reference, c.tolerance},
                       c.name);
            ok = ok && c.pass;
        }
        if (all_pass) *all_pass = ok ? 1 : 0;
        *out = t;
    });
}

size_t cdcp_table_rows(const cdcp_table* table) {
    return table ? table->n_rows : 0;
}

size_t cdcp_table_cols(const cdcp_table* table) {
    return table ? table->n_cols : 0;
}

const char* cdcp_table_col_name(const cdcp_table* table, size_t col) {
    if (!table || col >= table->n_cols) return nullptr;
    return table->col_names[col].c_str();
}

const char* cdcp_table_row_label(const cdcp_table* table, size_t row) {
    if (!table || row >= table->row_labels.size()) return nullptr;
    return table->row_labels[row].c_str();
}

double cdcp_table_cell(const cdcp_table* table, size_t row, size_t col) {
    if (!table || row >= table->n_rows || col >= table->n_cols) return 0.0;
    return table->data[row * table->n_cols + col];
}

void cdcp_table_free(cdcp_table* table) { delete table; }

}  // extern "C"
