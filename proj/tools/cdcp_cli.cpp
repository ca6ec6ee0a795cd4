// Command-line frontend. Links only the C API; file I/O, flag handling and
// CSV/JSON formatting live here.

#include <cdcp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

struct CliOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<unsigned> threads;
    std::string out_dir;
    std::string format;
    bool paper_tables = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "cannot read config file: " << path << "\n";
        std::exit(2);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// flags override config fields; merge before engine creation so the resolved
// config echoed into outputs reflects what actually ran
std::string merged_config(const CliOptions& opt) {
    json j = json::object();
    if (!opt.config_path.empty()) {
        try {
            j = json::parse(read_file(opt.config_path), nullptr, true, true);
        } catch (const std::exception& ex) {
            std::cerr << "config is not valid JSON: " << ex.what() << "\n";
            std::exit(2);
        }
    }
    if (opt.seed) j["run"]["seed"] = *opt.seed;
    if (opt.paths) j["run"]["n_paths"] = *opt.paths;
    if (opt.threads) j["run"]["threads"] = *opt.threads;
    if (!opt.out_dir.empty()) j["run"]["out_dir"] = opt.out_dir;
    if (!opt.format.empty()) j["run"]["format"] = opt.format;
    return j.dump();
}

class Engine {
public:
    explicit Engine(const std::string& config_json) {
        const cdcp_status st = cdcp_engine_create(config_json.c_str(), &engine_);
        if (st != CDCP_OK) {
            std::cerr << cdcp_status_name(st) << ": " << cdcp_last_create_error()
                      << "\n";
            std::exit(st == CDCP_ERR_CONFIG ? 2 : st);
        }
    }
    ~Engine() { cdcp_engine_free(engine_); }
    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    cdcp_engine* get() { return engine_; }

    [[noreturn]] void die(cdcp_status st) {
        std::cerr << cdcp_status_name(st) << ": " << cdcp_engine_last_error(engine_)
                  << "\n";
        std::exit(st);
    }

    json resolved() { return json::parse(cdcp_engine_resolved_config(engine_)); }

private:
    cdcp_engine* engine_ = nullptr;
};

struct OutputContext {
    std::filesystem::path dir;
    std::string format;
    json config;
};

OutputContext make_output_context(Engine& eng) {
    OutputContext ctx;
    ctx.config = eng.resolved();
    std::string dir = ctx.config["run"]["out_dir"].get<std::string>();
    if (dir == ".") {
        if (const char* env = std::getenv("CDCP_OUT_DIR")) dir = env;
    }
    ctx.dir = dir;
    ctx.format = ctx.config["run"]["format"].get<std::string>();
    std::filesystem::create_directories(ctx.dir);
    return ctx;
}

void write_csv(const OutputContext& ctx, const std::string& name,
               const cdcp_table* t, const std::string& label_col = "") {
    const auto path = ctx.dir / (name + ".csv");
    std::ofstream out(path);
    out << "# version: " << cdcp_version() << "\n";
    out << "# config: " << ctx.config.dump() << "\n";
    const size_t cols = cdcp_table_cols(t);
    if (!label_col.empty()) out << label_col << ",";
    for (size_t c = 0; c < cols; ++c)
        out << cdcp_table_col_name(t, c) << (c + 1 < cols ? "," : "\n");
    char buf[40];
    for (size_t r = 0; r < cdcp_table_rows(t); ++r) {
        if (!label_col.empty()) {
            const char* lbl = cdcp_table_row_label(t, r);
            out << '"' << (lbl ? lbl : "") << "\",";
        }
        for (size_t c = 0; c < cols; ++c) {
            std::snprintf(buf, sizeof buf, "%.9g", cdcp_table_cell(t, r, c));
            out << buf << (c + 1 < cols ? "," : "\n");
        }
    }
    std::cout << "wrote " << path.string() << "\n";
}

void write_json(const OutputContext& ctx, const std::string& name,
                const cdcp_table* t, const std::string& label_col = "") {
    const auto path = ctx.dir / (name + ".json");
    json doc;
    doc["version"] = cdcp_version();
    doc["config"] = ctx.config;
    json cols = json::array();
    for (size_t c = 0; c < cdcp_table_cols(t); ++c)
        cols.push_back(cdcp_table_col_name(t, c));
    doc["columns"] = cols;
    json rows = json::array();
    for (size_t r = 0; r < cdcp_table_rows(t); ++r) {
        json row = json::array();
        for (size_t c = 0; c < cdcp_table_cols(t); ++c)
            row.push_back(cdcp_table_cell(t, r, c));
        rows.push_back(row);
    }
    doc["rows"] = rows;
    if (!label_col.empty()) {
        json labels = json::array();
        for (size_t r = 0; r < cdcp_table_rows(t); ++r) {
            const char* lbl = cdcp_table_row_label(t, r);
            labels.push_back(lbl ? lbl : "");
        }
        doc["row_labels"] = labels;
    }
    std::ofstream(path) << doc.dump(2) << "\n";
    std::cout << "wrote " << path.string() << "\n";
}

void emit(const OutputContext& ctx, const std::string& name,
          const cdcp_table* t, bool mirror_both = false,
          const std::string& label_col = "") {
    if (mirror_both || ctx.format == "csv") write_csv(ctx, name, t, label_col);
    if (mirror_both || ctx.format == "json") write_json(ctx, name, t, label_col);
}

class TableGuard {
public:
    explicit TableGuard(cdcp_table* t = nullptr) : t_(t) {}
    ~TableGuard() { cdcp_table_free(t_); }
    cdcp_table** slot() { return &t_; }
    cdcp_table* get() const { return t_; }

private:
    cdcp_table* t_;
};

// price and sweep share one row schema:
//   param_value, L, measure, estimate, stderr, ci_lo, ci_hi, analytic
struct PremiumRow {
    double param_value = 0.0;
    double L = 0.0;
    std::string measure;
    double estimate = 0.0, stderr_ = 0.0, ci_lo = 0.0, ci_hi = 0.0;
    double analytic = 0.0;
    std::string note;  // skip reason, when a sweep value was rejected
    bool skipped = false;
};

void write_premium_rows(const OutputContext& ctx, const std::string& name,
                        const std::vector<PremiumRow>& rows) {
    {
        const auto path = ctx.dir / (name + ".csv");
        std::ofstream out(path);
        out << "# version: " << cdcp_version() << "\n";
        out << "# config: " << ctx.config.dump() << "\n";
        out << "param_value,L,measure,estimate,stderr,ci_lo,ci_hi,analytic,note\n";
        char buf[40];
        auto num = [&](double v) {
            std::snprintf(buf, sizeof buf, "%.9g", v);
            return std::string(buf);
        };
        for (const auto& r : rows) {
            if (r.skipped) {
                out << num(r.param_value) << ",,,,,,,,\"" << r.note << "\"\n";
                continue;
            }
            out << num(r.param_value) << "," << num(r.L) << "," << r.measure
                << "," << num(r.estimate) << "," << num(r.stderr_) << ","
                << num(r.ci_lo) << "," << num(r.ci_hi) << "," << num(r.analytic)
                << ",\n";
        }
        std::cout << "wrote " << path.string() << "\n";
    }
    {
        const auto path = ctx.dir / (name + ".json");
        json doc;
        doc["version"] = cdcp_version();
        doc["config"] = ctx.config;
        json jrows = json::array();
        for (const auto& r : rows) {
            json jr;
            jr["param_value"] = r.param_value;
            if (r.skipped) {
                jr["skipped"] = true;
                jr["note"] = r.note;
            } else {
                jr["L"] = r.L;
                jr["measure"] = r.measure;
                jr["estimate"] = r.estimate;
                jr["stderr"] = r.stderr_;
                jr["ci_lo"] = r.ci_lo;
                jr["ci_hi"] = r.ci_hi;
                jr["analytic"] = r.analytic;
            }
            jrows.push_back(jr);
        }
        doc["rows"] = jrows;
        std::ofstream(path) << doc.dump(2) << "\n";
        std::cout << "wrote " << path.string() << "\n";
    }
}

int cmd_moments(Engine& eng, const OutputContext& ctx) {
    const double T = ctx.config["run"]["t"].get<double>();
    std::vector<double> ts;
    for (int i = 0; i <= 10; ++i) ts.push_back(T * i / 10.0);
    for (auto measure : {CDCP_MEASURE_P, CDCP_MEASURE_PSTAR}) {
        TableGuard t;
        const cdcp_status st =
            cdcp_moments(eng.get(), measure, ts.data(), ts.size(), t.slot());
        if (st != CDCP_OK) eng.die(st);
        emit(ctx, measure == CDCP_MEASURE_P ? "moments_P" : "moments_Pstar",
             t.get());
    }
    return 0;
}

int cmd_bcurve(Engine& eng, const OutputContext& ctx) {
    TableGuard t;
    const cdcp_status st = cdcp_bcurve(eng.get(), t.slot());
    if (st != CDCP_OK) eng.die(st);
    emit(ctx, "bcurve", t.get());
    return 0;
}

int cmd_simulate(Engine& eng, const OutputContext& ctx, std::size_t n_paths) {
    for (auto measure : {CDCP_MEASURE_P, CDCP_MEASURE_PSTAR}) {
        const std::string tag = measure == CDCP_MEASURE_P ? "P" : "Pstar";
        TableGuard ev;
        cdcp_status st = cdcp_simulate_events(eng.get(), measure, n_paths, ev.slot());
        if (st != CDCP_OK) eng.die(st);
        emit(ctx, "events_" + tag, ev.get());
        TableGuard tr;
        st = cdcp_trajectories(eng.get(), measure, n_paths, 201, tr.slot());
        if (st != CDCP_OK) eng.die(st);
        emit(ctx, "paths_" + tag, tr.get());
    }
    return 0;
}

int cmd_price(Engine& eng, const OutputContext& ctx) {
    const double T = ctx.config["run"]["t"].get<double>();
    for (auto measure : {CDCP_MEASURE_P, CDCP_MEASURE_PSTAR}) {
        const std::string mname = measure == CDCP_MEASURE_P ? "P" : "Pstar";
        TableGuard t;
        cdcp_status st = cdcp_price(eng.get(), measure, t.slot());
        if (st != CDCP_OK) eng.die(st);
        // analytic mean of C_T under this measure, as the reference column
        TableGuard mom;
        st = cdcp_moments(eng.get(), measure, &T, 1, mom.slot());
        if (st != CDCP_OK) eng.die(st);
        const double analytic = cdcp_table_cell(mom.get(), 0, 3);
        std::vector<PremiumRow> rows;
        for (size_t r = 0; r < cdcp_table_rows(t.get()); ++r) {
            PremiumRow row;
            row.param_value = cdcp_table_cell(t.get(), r, 0);  // the retention
            row.L = row.param_value;
            row.measure = mname;
            row.estimate = cdcp_table_cell(t.get(), r, 1);
            row.stderr_ = cdcp_table_cell(t.get(), r, 2);
            row.ci_lo = cdcp_table_cell(t.get(), r, 3);
            row.ci_hi = cdcp_table_cell(t.get(), r, 4);
            row.analytic = analytic;
            rows.push_back(std::move(row));
        }
        write_premium_rows(ctx, "price_" + mname, rows);
    }
    return 0;
}

int cmd_sweep(Engine& eng, const OutputContext& ctx, const std::string& name) {
    TableGuard t;
    const cdcp_status st = cdcp_sweep(eng.get(), t.slot());
    if (st != CDCP_OK) eng.die(st);
    double retention = 25.0;
    if (ctx.config["run"].contains("sweep"))
        retention = ctx.config["run"]["sweep"].value("stop_loss_retention", 25.0);
    std::vector<PremiumRow> rows;
    for (size_t r = 0; r < cdcp_table_rows(t.get()); ++r) {
        PremiumRow row;
        row.param_value = cdcp_table_cell(t.get(), r, 0);
        if (cdcp_table_cell(t.get(), r, 1) != 0.0) {
            row.skipped = true;
            const char* lbl = cdcp_table_row_label(t.get(), r);
            row.note = lbl ? lbl : "skipped";
            rows.push_back(row);
            continue;
        }
        row.measure = "Pstar";
        row.analytic = cdcp_table_cell(t.get(), r, 2);
        row.L = 0.0;
        row.estimate = cdcp_table_cell(t.get(), r, 3);
        row.stderr_ = cdcp_table_cell(t.get(), r, 4);
        row.ci_lo = cdcp_table_cell(t.get(), r, 5);
        row.ci_hi = cdcp_table_cell(t.get(), r, 6);
        rows.push_back(row);
        row.L = retention;
        row.estimate = cdcp_table_cell(t.get(), r, 7);
        row.stderr_ = cdcp_table_cell(t.get(), r, 8);
        row.ci_lo = cdcp_table_cell(t.get(), r, 9);
        row.ci_hi = cdcp_table_cell(t.get(), r, 10);
        rows.push_back(row);
    }
    write_premium_rows(ctx, name, rows);
    return 0;
}

int cmd_validate(Engine& eng, const OutputContext& ctx) {
    TableGuard t;
    int all_pass = 0;
    const cdcp_status st = cdcp_validate(eng.get(), t.slot(), &all_pass);
    if (st != CDCP_OK) eng.die(st);
    for (size_t r = 0; r < cdcp_table_rows(t.get()); ++r) {
        const bool pass = cdcp_table_cell(t.get(), r, 0) != 0.0;
        std::cout << (pass ? "PASS  " : "FAIL  ")
                  << cdcp_table_row_label(t.get(), r)
                  << "  (value=" << cdcp_table_cell(t.get(), r, 1)
                  << ", reference=" << cdcp_table_cell(t.get(), r, 2)
                  << ", tol=" << cdcp_table_cell(t.get(), r, 3) << ")\n";
    }
    emit(ctx, "validate", t.get(), false, "check");
    return all_pass ? 0 : 4;
}

// the reference table grid: stop-loss premiums under both measures plus the
// theta/psi/nu sensitivity sweeps, in one invocation
int cmd_paper_tables(const CliOptions& opt) {
    struct SweepDef {
        const char* param;
        std::vector<double> values;
        const char* file;
    };
    const std::vector<SweepDef> sweeps = {
        {"theta", {1.00, 1.25, 1.50, 1.75}, "table2_theta"},
        {"psi", {1.00, 1.25, 1.50, 1.75}, "table3_psi"},
        {"nu", {-0.01, -0.05, -0.08, -0.10}, "table4_nu"},
    };
    {
        Engine eng(merged_config(opt));
        OutputContext ctx = make_output_context(eng);
        for (auto measure : {CDCP_MEASURE_P, CDCP_MEASURE_PSTAR}) {
            TableGuard t;
            const cdcp_status st = cdcp_price(eng.get(), measure, t.slot());
            if (st != CDCP_OK) eng.die(st);
            emit(ctx, measure == CDCP_MEASURE_P ? "table1_P" : "table1_Pstar",
                 t.get(), true);
        }
    }
    for (const auto& sw : sweeps) {
        json j = json::object();
        if (!opt.config_path.empty())
            j = json::parse(read_file(opt.config_path), nullptr, true, true);
        j["run"]["sweep"] = {{"param", sw.param},
                             {"values", sw.values},
                             {"stop_loss_retention", 25.0}};
        CliOptions o2 = opt;
        o2.config_path.clear();
        json merged = json::parse(merged_config(o2));
        merged.merge_patch(j);
        Engine eng(merged.dump());
        OutputContext ctx = make_output_context(eng);
        cmd_sweep(eng, ctx, sw.file);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compound dynamic contagion claims: tilted-measure moments, "
                 "simulation and stop-loss premiums"};
    app.set_version_flag("--version", std::string(cdcp_version()));
    app.fallthrough();

    CliOptions opt;
    app.add_option("--config", opt.config_path, "JSON run configuration file");
    app.add_option("--seed", opt.seed, "override run.seed");
    app.add_option("--paths", opt.paths, "override run.n_paths");
    app.add_option("--threads", opt.threads, "override run.threads");
    app.add_option("--out", opt.out_dir, "output directory (default: run.out_dir, else $CDCP_OUT_DIR)");
    app.add_option("--format", opt.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--paper-tables", opt.paper_tables,
                 "emit the bundled reference grid: stop-loss tables under both "
                 "measures plus theta/psi/nu sweeps");

    auto* sub_moments = app.add_subcommand("moments", "first moments of lambda, N, C under both measures");
    auto* sub_bcurve = app.add_subcommand("bcurve", "solved (t, B(t), K(t)) curves");
    auto* sub_sim = app.add_subcommand("simulate", "per-path event logs and sampled trajectories");
    std::size_t sim_paths = 25;
    sub_sim->add_option("--sim-paths", sim_paths, "number of paths to emit");
    auto* sub_price = app.add_subcommand("price", "stop-loss premium table under both measures");
    auto* sub_sweep = app.add_subcommand("sweep", "sensitivity sweep from the config's run.sweep block");
    auto* sub_validate = app.add_subcommand("validate", "run the internal consistency checks");
    app.require_subcommand(0, 1);

    CLI11_PARSE(app, argc, argv);

    if (opt.paper_tables) return cmd_paper_tables(opt);
    if (app.get_subcommands().empty()) {
        std::cerr << "no subcommand given (try --help)\n";
        return 1;
    }

    Engine eng(merged_config(opt));
    OutputContext ctx = make_output_context(eng);
    if (sub_moments->parsed()) return cmd_moments(eng, ctx);
    if (sub_bcurve->parsed()) return cmd_bcurve(eng, ctx);
    if (sub_sim->parsed()) return cmd_simulate(eng, ctx, sim_paths);
    if (sub_price->parsed()) return cmd_price(eng, ctx);
    if (sub_sweep->parsed()) return cmd_sweep(eng, ctx, "sweep");
    if (sub_validate->parsed()) return cmd_validate(eng, ctx);
    return 1;
}
