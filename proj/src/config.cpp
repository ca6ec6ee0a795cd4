#include "cdcp/config.hpp"

#include <json.hpp>

#include "cdcp/errors.hpp"
#include "cdcp/version.hpp"

namespace cdcp {

using nlohmann::json;

namespace {

JumpDist jump_dist_from(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("kind") || !j.contains("rate"))
        fail(ErrorCode::ConfigInvalid,
             where + ": expected {\"kind\", \"rate\"[, \"shape\"]}");
    const std::string kind = j.at("kind").get<std::string>();
    const double rate = j.at("rate").get<double>();
    if (kind == "exponential") {
        if (j.contains("shape") && j.at("shape").get<double>() != 1.0)
            fail(ErrorCode::ConfigInvalid, where + ": exponential has shape 1");
        return JumpDist::exponential(rate);
    }
    if (kind == "gamma")
        return JumpDist::gamma(rate, j.value("shape", 1.0));
    fail(ErrorCode::ConfigInvalid,
         where + ": kind must be \"exponential\" or \"gamma\", got \"" + kind + "\"");
}

json jump_dist_to_json(const JumpDist& d) {
    json j;
    j["kind"] = d.kind() == JumpKind::Exponential ? "exponential" : "gamma";
    j["rate"] = d.rate();
    if (d.kind() == JumpKind::Gamma) j["shape"] = d.shape();
    return j;
}

SweepSpec sweep_from(const json& j) {
    SweepSpec s;
    s.param = sweep_param_from_string(j.value("param", std::string("theta")));
    if (!j.contains("values") || !j.at("values").is_array() )
        fail(ErrorCode::ConfigInvalid, "run.sweep.values must be an array");
    s.values = j.at("values").get<std::vector<double>>();
    s.stop_loss_retention = j.value("stop_loss_retention", 25.0);
    return s;
}

}  // namespace

JumpDist jump_dist_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& ex) {
        fail(ErrorCode::ConfigInvalid, std::string("bad distribution JSON: ") + ex.what());
    }
    return jump_dist_from(j, "distribution");
}

RunConfig default_config() {
    RunConfig cfg;
    cfg.esscher = EsscherParams{1.25, 1.25, -0.05, 0.01};
    return cfg;
}

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
    } catch (const std::exception& ex) {
        fail(ErrorCode::ConfigInvalid, std::string("config is not valid JSON: ") + ex.what());
    }
    RunConfig cfg = default_config();
    try {
        if (j.contains("model")) {
            const auto& m = j.at("model");
            cfg.model.lambda0 = m.value("lambda0", cfg.model.lambda0);
            cfg.model.a = m.value("a", cfg.model.a);
            cfg.model.delta = m.value("delta", cfg.model.delta);
            cfg.model.rho = m.value("rho", cfg.model.rho);
            if (m.contains("G")) cfg.model.G = jump_dist_from(m.at("G"), "model.G");
            if (m.contains("H")) cfg.model.H = jump_dist_from(m.at("H"), "model.H");
            if (m.contains("J")) cfg.model.J = jump_dist_from(m.at("J"), "model.J");
        }
        if (j.contains("esscher")) {
            const auto& e = j.at("esscher");
            cfg.esscher.theta = e.value("theta", cfg.esscher.theta);
            cfg.esscher.psi = e.value("psi", cfg.esscher.psi);
            cfg.esscher.nu = e.value("nu", cfg.esscher.nu);
            cfg.esscher.b = e.value("b", cfg.esscher.b);
            cfg.grid_points = e.value("grid_points", cfg.grid_points);
        }
        if (j.contains("run")) {
            const auto& r = j.at("run");
            cfg.t = r.value("t", cfg.t);
            cfg.dt_max = r.value("dt_max", cfg.dt_max);
            cfg.n_paths = r.value("n_paths", cfg.n_paths);
            cfg.seed = r.value("seed", cfg.seed);
            cfg.threads = r.value("threads", cfg.threads);
            if (r.contains("retentions"))
                cfg.retentions = r.at("retentions").get<std::vector<double>>();
            if (r.contains("sweep") && !r.at("sweep").is_null())
                cfg.sweep = sweep_from(r.at("sweep"));
            cfg.out_dir = r.value("out_dir", cfg.out_dir);
            cfg.format = r.value("format", cfg.format);
        }
    } catch (const Error&) {
        throw;
    } catch (const std::exception& ex) {
        fail(ErrorCode::ConfigInvalid, std::string("config field error: ") + ex.what());
    }
    cfg.validate();
    return cfg;
}

void RunConfig::validate() const {
    model.validate();
    try {
        esscher.validate(model);
    } catch (const Error& e) {
        // config context: surface every cross-field violation as ConfigInvalid
        fail(ErrorCode::ConfigInvalid, e.what());
    }
    if (grid_points < 2) fail(ErrorCode::ConfigInvalid, "esscher.grid_points must be >= 2");
    if (!(t > 0.0)) fail(ErrorCode::ConfigInvalid, "run.t must be > 0");
    if (!(dt_max > 0.0)) fail(ErrorCode::ConfigInvalid, "run.dt_max must be > 0");
    if (n_paths < 2) fail(ErrorCode::ConfigInvalid, "run.n_paths must be >= 2");
    for (double L : retentions)
        if (L < 0.0) fail(ErrorCode::ConfigInvalid, "retentions must be >= 0");
    if (format != "csv" && format != "json")
        fail(ErrorCode::ConfigInvalid, "run.format must be \"csv\" or \"json\"");
}

std::string RunConfig::resolved_json() const {
    json j;
    j["model"] = {{"lambda0", model.lambda0}, {"a", model.a},
                  {"delta", model.delta},     {"rho", model.rho},
                  {"G", jump_dist_to_json(model.G)},
                  {"H", jump_dist_to_json(model.H)},
                  {"J", jump_dist_to_json(model.J)}};
    j["esscher"] = {{"theta", esscher.theta}, {"psi", esscher.psi},
                    {"nu", esscher.nu},       {"b", esscher.b},
                    {"grid_points", grid_points}};
    json run = {{"t", t},
                {"dt_max", dt_max},
                {"n_paths", n_paths},
                {"seed", seed},
                {"threads", threads},
                {"retentions", retentions},
                {"out_dir", out_dir},
                {"format", format}};
    if (sweep) {
        run["sweep"] = {{"param", sweep_param_name(sweep->param)},
                        {"values", sweep->values},
                        {"stop_loss_retention", sweep->stop_loss_retention}};
    }
    j["run"] = run;
    j["version"] = kVersion;
    return j.dump();
}

}  // namespace cdcp
