#include "bflim/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bflim/ar1.hpp"
#include "bflim/assumptions.hpp"
#include "bflim/asymptotics.hpp"
#include "bflim/common.hpp"
#include "bflim/klrate.hpp"
#include "bflim/quadrature.hpp"
#include "bflim/rng.hpp"

namespace fs = std::filesystem;

namespace bflim {

namespace {

int resolve_threads(const RunOptions& opts) {
    if (opts.threads > 0) return opts.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

QuadratureSettings quad_settings(const ExperimentConfig& cfg, int threads) {
    QuadratureSettings s;
    s.rule = cfg.quadrature.rule;
    s.max_resolution = cfg.quadrature.max_resolution;
    s.threads = threads;
    return s;
}

std::string iso_now() {
    const std::time_t t =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm g{};
    gmtime_r(&t, &g);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &g);
    return buf;
}

std::string jstr(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char esc[8];
                    std::snprintf(esc, sizeof(esc), "\\u%04x",
                                  static_cast<unsigned>(c));
                    out += esc;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
    return out;
}

bool wants_format(const ExperimentConfig& cfg, const std::string& f) {
    return std::find(cfg.outputs.formats.begin(), cfg.outputs.formats.end(),
                     f) != cfg.outputs.formats.end();
}

struct RunContext {
    fs::path dir;
    RunRecord record;
};

RunContext open_run(const ExperimentConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    RunContext ctx;
    ctx.record.run_id = run_id(cfg);
    ctx.record.started = iso_now();
    const fs::path root =
        opts.out_dir.empty() ? fs::path(cfg.outputs.directory)
                             : fs::path(opts.out_dir);
    ctx.dir = root / (cfg.suite_name + "-" + ctx.record.run_id);
    try {
        fs::create_directories(ctx.dir);
    } catch (const fs::filesystem_error& e) {
        throw ConfigError("cannot create run directory " + ctx.dir.string() +
                          ": " + e.what());
    }
    return ctx;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Append-only artifact write: a rerun with the same run id must reproduce
// the same bytes, in which case the existing file stands untouched.
void write_artifact(RunContext& ctx, const std::string& name,
                    const std::string& content) {
    const fs::path target = ctx.dir / name;
    if (fs::exists(target)) {
        if (read_file(target) == content) {
            ctx.record.artifacts.push_back(name);
            return;
        }
        throw NumericError("artifact " + name + " in " + ctx.dir.string() +
                           " differs from this rerun of the same config; "
                           "refusing to overwrite");
    }
    const fs::path tmp = ctx.dir / (name + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary);
        out << content;
        if (!out) {
            throw ConfigError("cannot write " + tmp.string());
        }
    }
    fs::rename(tmp, target);
    ctx.record.artifacts.push_back(name);
}

// The run record keeps the first completed run's timestamps; reruns only
// verify artifacts and leave it in place.
void finish_run(RunContext& ctx, int exit_code) {
    ctx.record.finished = iso_now();
    ctx.record.status = exit_code == 0 ? "pass" : "fail";
    const fs::path target = ctx.dir / "run.json";
    if (fs::exists(target)) return;
    std::string j = "{\n";
    j += "  \"run_id\": " + jstr(ctx.record.run_id) + ",\n";
    j += "  \"started\": " + jstr(ctx.record.started) + ",\n";
    j += "  \"finished\": " + jstr(ctx.record.finished) + ",\n";
    j += "  \"status\": " + jstr(ctx.record.status) + ",\n";
    j += "  \"artifacts\": [";
    for (std::size_t i = 0; i < ctx.record.artifacts.size(); ++i) {
        if (i > 0) j += ", ";
        j += jstr(ctx.record.artifacts[i]);
    }
    j += "]\n}\n";
    std::ofstream out(target, std::ios::binary);
    out << j;
}

std::vector<ModelSpec> build_models(const ExperimentConfig& cfg) {
    std::vector<ModelSpec> models;
    models.reserve(cfg.models.size());
    for (const ModelConfig& mc : cfg.models) models.push_back(build_model(mc));
    return models;
}

}  // namespace

std::vector<KlTableRow> kl_probe_rows(const ModelSpec& model,
                                      const TrueProcess& process,
                                      const std::vector<ParamPoint>& thetas,
                                      std::size_t n, std::size_t replications,
                                      std::uint64_t seed) {
    if (thetas.empty()) {
        throw ConfigError("kl_probe_rows: no probe points");
    }
    process.validate();
    std::vector<KlTableRow> rows(thetas.size());
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        KlTableRow& row = rows[i];
        row.theta = thetas[i];
        const DivergenceRate mc = kl_rate_mc(model, thetas[i], process, n,
                                             replications, rng::split(seed, i));
        row.mc_value = mc.value;
        row.mc_se = mc.std_error;
        if (model.family.has_value()) {
            row.has_closed_form = true;
            row.closed_form = closed_form_rate(model, thetas[i], process).value;
            const double gap = row.mc_value - row.closed_form;
            if (row.mc_se == 0.0) {
                row.gap_in_se =
                    gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
            } else {
                row.gap_in_se = gap / row.mc_se;
            }
        }
    }
    return rows;
}

int cmd_simulate(const ExperimentConfig& cfg, const RunOptions& opts) {
    RunContext ctx = open_run(cfg, opts);
    write_artifact(ctx, "config.json", serialize_config(cfg));
    const std::size_t n = cfg.checkpoints.back();
    for (std::uint64_t seed : cfg.seeds) {
        const TimeSeries series = simulate_ar1(cfg.process, n, seed);
        std::string body;
        body.reserve(series.n() * 20);
        for (double x : series.values()) {
            body += fmt17(x);
            body += '\n';
        }
        write_artifact(ctx, "series-" + std::to_string(seed) + ".txt", body);
    }
    finish_run(ctx, 0);
    std::printf("simulate: wrote %zu series of length %zu to %s\n",
                cfg.seeds.size(), n, ctx.dir.string().c_str());
    return 0;
}

int cmd_trajectory(const ExperimentConfig& cfg, const RunOptions& opts) {
    if (cfg.models.size() < 2) {
        throw ConfigError("trajectory: at least 2 models required");
    }
    if (cfg.seeds.size() < 2) {
        throw ConfigError("trajectory: at least 2 seeds required to fit the limit");
    }
    RunContext ctx = open_run(cfg, opts);
    write_artifact(ctx, "config.json", serialize_config(cfg));

    const int threads = resolve_threads(opts);
    const std::vector<ModelSpec> models = build_models(cfg);
    const QuadratureSettings inner =
        quad_settings(cfg, cfg.seeds.size() > 1 ? 1 : threads);

    std::vector<Trajectory> trs(cfg.seeds.size());
    parallel_chunks(cfg.seeds.size(), threads, [&](std::size_t i) {
        trs[i] = trajectory(cfg.process, models[0], models[1], cfg.checkpoints,
                            cfg.seeds[i], cfg.quadrature.tol, inner);
    });
    const LimitEstimate fit = fit_limit(trs, 0.25);

    if (wants_format(cfg, "jsonl")) {
        std::string body;
        for (const Trajectory& t : trs) {
            for (std::size_t i = 0; i < t.checkpoints.size(); ++i) {
                body += "{\"run_id\": " + jstr(ctx.record.run_id) +
                        ", \"seed\": " + std::to_string(t.seed) +
                        ", \"n\": " + std::to_string(t.checkpoints[i]) +
                        ", \"value\": " + fmt17(t.values[i]) +
                        ", \"theory_limit\": " + fmt17(t.theory_limit) + "}\n";
            }
        }
        write_artifact(ctx, "trajectories.jsonl", body);
    }

    std::size_t passed = 0;
    std::string csv = "seed,final_value,theory_limit,point,halfwidth,pass\n";
    for (const Trajectory& t : trs) {
        const double final_value = t.values.back();
        const bool pass = std::fabs(final_value - t.theory_limit) <= cfg.tolerance;
        if (pass) ++passed;
        csv += std::to_string(t.seed) + "," + fmt17(final_value) + "," +
               fmt17(t.theory_limit) + "," + fmt17(fit.point) + "," +
               fmt17(fit.halfwidth) + "," + (pass ? "1" : "0") + "\n";
    }
    if (wants_format(cfg, "csv")) {
        write_artifact(ctx, "summary.csv", csv);
    }

    if (cfg.models.size() > 2) {
        const SelectionReport sel =
            select_model(cfg.process, models, cfg.checkpoints.back(), cfg.seeds,
                         cfg.quadrature.tol, quad_settings(cfg, threads));
        std::string j = "{\n  \"winner\": " + jstr(sel.winner) + ",\n";
        j += "  \"signs_consistent\": ";
        j += sel.signs_consistent ? "true" : "false";
        j += ",\n  \"rates\": [\n";
        for (std::size_t i = 0; i < sel.rates.size(); ++i) {
            j += "    {\"model\": " + jstr(sel.rates[i].first) +
                 ", \"value\": " + fmt17(sel.rates[i].second.value) +
                 ", \"std_error\": " + fmt17(sel.rates[i].second.std_error) +
                 ", \"method\": " + jstr(sel.rates[i].second.method) + "}";
            j += i + 1 < sel.rates.size() ? ",\n" : "\n";
        }
        j += "  ],\n  \"notes\": [";
        for (std::size_t i = 0; i < sel.sign_notes.size(); ++i) {
            if (i > 0) j += ", ";
            j += jstr(sel.sign_notes[i]);
        }
        j += "]\n}\n";
        write_artifact(ctx, "selection.json", j);
    }

    const double frac =
        static_cast<double>(passed) / static_cast<double>(trs.size());
    const int code = frac >= 0.9 ? 0 : 1;
    finish_run(ctx, code);
    std::printf(
        "trajectory: %zu/%zu paths within %.17g of the predicted limit %.17g "
        "(point %.6f, halfwidth %.6f)\n",
        passed, trs.size(), cfg.tolerance, trs.front().theory_limit, fit.point,
        fit.halfwidth);
    return code;
}

int cmd_kl(const ExperimentConfig& cfg, const RunOptions& opts) {
    RunContext ctx = open_run(cfg, opts);
    write_artifact(ctx, "config.json", serialize_config(cfg));

    const ModelSpec probe = make_ar1_model(
        "kl-probe", make_domain1(Interval{-1.0, 1.0, true, true}),
        SigmaSpec::over(Interval{0.1, 5.0}), PriorSpec{});
    std::vector<ParamPoint> thetas;
    for (double s : cfg.kl.sigma_probes) {
        for (double r : cfg.kl.rho_probes) {
            const ParamPoint p = ParamPoint::d2(r, s);
            if (!probe.domain.contains(p)) {
                throw ConfigError("kl probe (rho=" + fmt17(r) + ", sigma=" +
                                  fmt17(s) +
                                  ") is outside (-1,1) x [0.1, 5]");
            }
            thetas.push_back(p);
        }
    }
    const std::vector<KlTableRow> rows = kl_probe_rows(
        probe, cfg.process, thetas, cfg.kl.n, cfg.kl.replications, cfg.kl.seed);

    std::string csv = "rho,sigma,closed_form,mc_value,mc_se,gap_in_se\n";
    std::string jsonl;
    std::size_t ok = 0;
    std::size_t judged = 0;
    for (const KlTableRow& row : rows) {
        const std::string rho = fmt17(row.theta.rho());
        const std::string sigma = fmt17(row.theta.coord[1]);
        const std::string closed =
            row.has_closed_form ? fmt17(row.closed_form) : "";
        const std::string gap = row.has_closed_form ? fmt17(row.gap_in_se) : "";
        csv += rho + "," + sigma + "," + closed + "," + fmt17(row.mc_value) +
               "," + fmt17(row.mc_se) + "," + gap + "\n";
        jsonl += "{\"rho\": " + rho + ", \"sigma\": " + sigma +
                 ", \"closed_form\": " +
                 (row.has_closed_form ? fmt17(row.closed_form) : "null") +
                 ", \"mc_value\": " + fmt17(row.mc_value) +
                 ", \"mc_se\": " + fmt17(row.mc_se) + ", \"gap_in_se\": " +
                 (row.has_closed_form ? fmt17(row.gap_in_se) : "null") + "}\n";
        if (row.has_closed_form) {
            ++judged;
            if (std::fabs(row.gap_in_se) <= 3.0) ++ok;
        }
    }
    if (wants_format(cfg, "csv")) write_artifact(ctx, "kl_table.csv", csv);
    if (wants_format(cfg, "jsonl")) write_artifact(ctx, "kl_table.jsonl", jsonl);

    const int code =
        judged == 0 || static_cast<double>(ok) >= 0.95 * static_cast<double>(judged)
            ? 0
            : 1;
    finish_run(ctx, code);
    std::printf("kl: %zu/%zu probes within 3 standard errors of closed form\n",
                ok, judged);
    return code;
}

int cmd_marginal(const ExperimentConfig& cfg, const RunOptions& opts) {
    RunContext ctx = open_run(cfg, opts);
    write_artifact(ctx, "config.json", serialize_config(cfg));

    const int threads = resolve_threads(opts);
    const std::vector<ModelSpec> models = build_models(cfg);
    const std::size_t n = cfg.checkpoints.back();
    const QuadratureSettings inner =
        quad_settings(cfg, cfg.seeds.size() > 1 ? 1 : threads);

    std::string csv =
        "model,seed,n,log_marginal,resolution_rho,resolution_sigma,"
        "evaluations\n";
    std::string jsonl;
    for (const ModelSpec& model : models) {
        std::vector<MarginalResult> results(cfg.seeds.size());
        parallel_chunks(cfg.seeds.size(), threads, [&](std::size_t i) {
            const TimeSeries series = simulate_ar1(cfg.process, n, cfg.seeds[i]);
            results[i] = refine_until(model, series, cfg.quadrature.tol, inner);
        });
        for (std::size_t i = 0; i < results.size(); ++i) {
            const MarginalResult& r = results[i];
            const std::string res_sigma =
                r.dims == 2 ? std::to_string(r.resolution[1]) : "";
            csv += model.name + "," + std::to_string(cfg.seeds[i]) + "," +
                   std::to_string(n) + "," + fmt17(r.value) + "," +
                   std::to_string(r.resolution[0]) + "," + res_sigma + "," +
                   std::to_string(r.evaluations) + "\n";
            jsonl += "{\"model\": " + jstr(model.name) +
                     ", \"seed\": " + std::to_string(cfg.seeds[i]) +
                     ", \"n\": " + std::to_string(n) +
                     ", \"log_marginal\": " + fmt17(r.value) +
                     ", \"resolution_rho\": " + std::to_string(r.resolution[0]) +
                     ", \"resolution_sigma\": " +
                     (r.dims == 2 ? std::to_string(r.resolution[1]) : "null") +
                     ", \"evaluations\": " + std::to_string(r.evaluations) +
                     "}\n";
        }
    }
    if (wants_format(cfg, "csv")) write_artifact(ctx, "marginals.csv", csv);
    if (wants_format(cfg, "jsonl")) write_artifact(ctx, "marginals.jsonl", jsonl);
    finish_run(ctx, 0);
    std::printf("marginal: %zu converged marginals at n=%zu\n",
                models.size() * cfg.seeds.size(), n);
    return 0;
}

namespace {

struct CheckRow {
    std::string check;
    std::string model;
    std::string status;
    std::string detail;
    std::string json;
};

CheckRow a2_check_row(const ExperimentConfig& cfg) {
    const A2Config& a2 = cfg.assumptions.a2;
    const std::vector<A2Point> pts = a2_expectation_probe(
        cfg.process, a2.rho1, a2.n_list, a2.replications, cfg.assumptions.seed);
    const A2Point& last = pts.back();
    bool all_zero = true;
    for (const A2Point& p : pts) all_zero = all_zero && p.closed_form_gap == 0.0;

    CheckRow row;
    row.check = "(A2)";
    row.model = "-";
    double slope = 0.0;
    if (all_zero) {
        row.status = "OK";
        row.detail = "gap identically 0 (rho1 equals the true coefficient)";
    } else {
        slope = loglog_slope(pts);
        const bool slope_ok = slope >= -1.3 && slope <= -0.7;
        const bool gap_ok = last.closed_form_gap <= 3.0 * last.std_error;
        bool decreasing = true;
        for (std::size_t i = 1; i < pts.size(); ++i)
            decreasing =
                decreasing && pts[i].closed_form_gap < pts[i - 1].closed_form_gap;
        row.status = slope_ok && gap_ok && decreasing ? "OK" : "WARN";
        row.detail = "gap decay slope " + fmt17(slope) + ", final gap " +
                     fmt17(last.closed_form_gap) + " (se " +
                     fmt17(last.std_error) + ")" +
                     (decreasing ? "" : ", gaps not decreasing");
    }
    row.json = "{\"check\": \"(A2)\", \"rho1\": " + fmt17(a2.rho1) +
               ", \"slope\": " + fmt17(slope) +
               ", \"final_gap\": " + fmt17(last.closed_form_gap) +
               ", \"final_se\": " + fmt17(last.std_error) + ", \"status\": " +
               jstr(row.status) + "}";
    return row;
}

CheckRow a3_check_row(const ExperimentConfig& cfg, const ModelSpec& model) {
    const A3Config& a3 = cfg.assumptions.a3;
    const std::vector<SupGapPoint> sups = uniform_convergence_probe(
        model, cfg.process, a3.n_list, a3.grid_resolution,
        cfg.assumptions.seed);
    const double first_sup = sups.front().sup_gap;
    const double last_sup = sups.back().sup_gap;

    CheckRow row;
    row.check = "(A3)";
    row.model = model.name;
    if (a3.grid_resolution <= 1) {
        row.status = "WARN";
        row.detail = "grid too coarse (resolution " +
                     std::to_string(a3.grid_resolution) +
                     " point per unit length)";
    } else if ((sups.size() == 1 || last_sup < first_sup) &&
               last_sup <= a3.sup_threshold) {
        row.status = "OK";
        row.detail = "sup gap " + fmt17(first_sup) + " -> " + fmt17(last_sup) +
                     " (threshold " + fmt17(a3.sup_threshold) + ")";
    } else {
        row.status = "WARN";
        row.detail = "sup gap " + fmt17(first_sup) + " -> " + fmt17(last_sup) +
                     " exceeds threshold " + fmt17(a3.sup_threshold) +
                     " or is not decreasing";
    }
    row.json = "{\"check\": \"(A3)\", \"model\": " + jstr(model.name) +
               ", \"first_sup\": " + fmt17(first_sup) + ", \"final_sup\": " +
               fmt17(last_sup) + ", \"threshold\": " + fmt17(a3.sup_threshold) +
               ", \"status\": " + jstr(row.status) + "}";
    return row;
}

CheckRow a4_check_row(const ExperimentConfig& cfg, const ModelSpec& model) {
    const A4Config& a4 = cfg.assumptions.a4;
    const double mass =
        divergence_set_mass(model, closed_form_rate_fn(model, cfg.process),
                            a4.threshold, a4.grid_resolution);
    CheckRow row;
    row.check = "(A4)";
    row.model = model.name;
    row.status = mass == 0.0 ? "OK" : "WARN";
    row.detail = "prior mass of {h > " + fmt17(a4.threshold) + "} is " +
                 fmt17(mass);
    row.json = "{\"check\": \"(A4)\", \"model\": " + jstr(model.name) +
               ", \"mass\": " + fmt17(mass) + ", \"threshold\": " +
               fmt17(a4.threshold) + ", \"status\": " + jstr(row.status) + "}";
    return row;
}

std::vector<CheckRow> a5_check_rows(const ExperimentConfig& cfg,
                                    const ModelSpec& model) {
    const A5Config& a5 = cfg.assumptions.a5;
    const std::vector<SieveMassPoint> pts =
        sieve_mass_check(model, cfg.process,
                         exp_truncation_sieve(model, a5.beta), a5.alpha,
                         a5.t_list);
    std::vector<CheckRow> rows;
    rows.reserve(pts.size());
    for (const SieveMassPoint& p : pts) {
        CheckRow row;
        row.check = "(A5)(2)";
        row.model = model.name;
        row.status = p.ok ? "OK" : "WARN";
        row.detail = "T=" + std::to_string(p.index) + ": mass " +
                     fmt17(p.mass) + " vs bound " + fmt17(p.bound);
        row.json = "{\"check\": \"(A5)(2)\", \"model\": " + jstr(model.name) +
                   ", \"T\": " + std::to_string(p.index) + ", \"mass\": " +
                   fmt17(p.mass) + ", \"bound\": " + fmt17(p.bound) +
                   ", \"status\": " + jstr(row.status) + "}";
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

int cmd_check_assumptions(const ExperimentConfig& cfg, const RunOptions& opts) {
    RunContext ctx = open_run(cfg, opts);
    write_artifact(ctx, "config.json", serialize_config(cfg));

    const std::vector<ModelSpec> models = build_models(cfg);
    std::vector<CheckRow> rows;
    rows.push_back(a2_check_row(cfg));
    for (const ModelSpec& model : models) rows.push_back(a3_check_row(cfg, model));
    for (const ModelSpec& model : models) rows.push_back(a4_check_row(cfg, model));
    for (const ModelSpec& model : models) {
        const std::vector<CheckRow> sieve_rows = a5_check_rows(cfg, model);
        rows.insert(rows.end(), sieve_rows.begin(), sieve_rows.end());
    }

    std::string jsonl;
    std::size_t warns = 0;
    std::printf("%-8s %-14s %-6s %s\n", "check", "model", "status", "detail");
    for (const CheckRow& row : rows) {
        jsonl += row.json + "\n";
        if (row.status != "OK") ++warns;
        std::printf("%-8s %-14s %-6s %s\n", row.check.c_str(),
                    row.model.c_str(), row.status.c_str(), row.detail.c_str());
    }
    if (wants_format(cfg, "jsonl")) {
        write_artifact(ctx, "diagnostics.jsonl", jsonl);
    }

    const int code = warns == 0 ? 0 : 1;
    finish_run(ctx, code);
    std::printf("check: %zu diagnostics, %zu warnings\n", rows.size(), warns);
    return code;
}

}  // namespace bflim
