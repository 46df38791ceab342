#include "bflim/config.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "bflim/common.hpp"
#include "json.hpp"

namespace bflim {

namespace {

using ojson = nlohmann::ordered_json;

void expect_keys(const ojson& j, std::initializer_list<const char*> keys,
                 const std::string& where) {
    if (!j.is_object()) {
        throw ConfigError("config: " + where + " must be an object");
    }
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : keys) {
            if (item.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError("config: unknown key \"" + item.key() + "\" in " +
                              where);
        }
    }
}

Interval parse_interval(const ojson& j, const std::string& where) {
    expect_keys(j, {"lo", "hi", "open_lo", "open_hi"}, where);
    Interval iv;
    iv.lo = j.at("lo").get<double>();
    iv.hi = j.at("hi").get<double>();
    iv.open_lo = j.value("open_lo", false);
    iv.open_hi = j.value("open_hi", false);
    return iv;
}

ojson interval_json(const Interval& iv) {
    ojson j;
    j["lo"] = iv.lo;
    j["hi"] = iv.hi;
    if (iv.open_lo) j["open_lo"] = true;
    if (iv.open_hi) j["open_hi"] = true;
    return j;
}

ModelConfig parse_model(const ojson& j, const std::string& where) {
    expect_keys(j, {"name", "rho_intervals", "sigma", "prior"}, where);
    ModelConfig mc;
    mc.name = j.at("name").get<std::string>();
    if (!j.contains("rho_intervals") || !j.at("rho_intervals").is_array() ||
        j.at("rho_intervals").empty()) {
        throw ConfigError("config: " + where +
                          ".rho_intervals must be a non-empty array");
    }
    for (const ojson& iv : j.at("rho_intervals")) {
        mc.rho_intervals.push_back(parse_interval(iv, where + ".rho_intervals"));
    }
    if (j.contains("sigma")) {
        const ojson& s = j.at("sigma");
        expect_keys(s, {"known", "fixed", "lo", "hi"}, where + ".sigma");
        const bool known = s.value("known", true);
        if (known) {
            mc.sigma = SigmaSpec::fixed_at(s.value("fixed", 1.0));
        } else {
            Interval r;
            r.lo = s.at("lo").get<double>();
            r.hi = s.at("hi").get<double>();
            mc.sigma = SigmaSpec::over(r);
        }
    }
    if (j.contains("prior")) {
        const ojson& p = j.at("prior");
        expect_keys(p, {"kind", "mu", "sd"}, where + ".prior");
        const std::string kind = p.value("kind", std::string("uniform"));
        if (kind == "uniform") {
            mc.prior.kind = PriorSpec::Kind::uniform;
        } else if (kind == "trunc_normal_rho") {
            mc.prior.kind = PriorSpec::Kind::trunc_normal_rho;
        } else {
            throw ConfigError("config: " + where + ".prior.kind \"" + kind +
                              "\" is not one of uniform, trunc_normal_rho");
        }
        mc.prior.mu = p.value("mu", 0.0);
        mc.prior.sd = p.value("sd", 1.0);
    }
    return mc;
}

ojson model_json(const ModelConfig& mc) {
    ojson j;
    j["name"] = mc.name;
    ojson ivs = ojson::array();
    for (const Interval& iv : mc.rho_intervals) ivs.push_back(interval_json(iv));
    j["rho_intervals"] = std::move(ivs);
    ojson s;
    if (mc.sigma.known) {
        s["known"] = true;
        s["fixed"] = mc.sigma.fixed;
    } else {
        s["known"] = false;
        s["lo"] = mc.sigma.range.lo;
        s["hi"] = mc.sigma.range.hi;
    }
    j["sigma"] = std::move(s);
    ojson p;
    p["kind"] = mc.prior.kind == PriorSpec::Kind::uniform ? "uniform"
                                                          : "trunc_normal_rho";
    if (mc.prior.kind == PriorSpec::Kind::trunc_normal_rho) {
        p["mu"] = mc.prior.mu;
        p["sd"] = mc.prior.sd;
    }
    j["prior"] = std::move(p);
    return j;
}

template <typename T>
std::vector<T> parse_list(const ojson& j, const std::string& where) {
    if (!j.is_array() || j.empty()) {
        throw ConfigError("config: " + where + " must be a non-empty array");
    }
    std::vector<T> out;
    for (const ojson& v : j) out.push_back(v.get<T>());
    return out;
}

QuadRule parse_rule(const std::string& name) {
    if (name == "gauss_legendre") return QuadRule::gauss_legendre;
    if (name == "midpoint") return QuadRule::midpoint;
    throw ConfigError("config: quadrature.rule \"" + name +
                      "\" is not one of gauss_legendre, midpoint");
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<ModelConfig> stationary_pair(const SigmaSpec& sigma) {
    ModelConfig m1;
    m1.name = "M1";
    m1.rho_intervals = {Interval{-1.0, 1.0, true, true}};
    m1.sigma = sigma;
    ModelConfig m2;
    m2.name = "M2";
    m2.rho_intervals = {Interval{-1.5, -1.0, false, false},
                        Interval{1.0, 1.5, false, false}};
    m2.sigma = sigma;
    return {m1, m2};
}

std::vector<std::uint64_t> default_seeds() {
    std::vector<std::uint64_t> s(20);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = i + 1;
    return s;
}

}  // namespace

void ExperimentConfig::validate() const {
    process.validate();
    if (models.empty()) {
        throw ConfigError("config: at least one model is required");
    }
    std::set<std::string> names;
    for (const ModelConfig& mc : models) {
        if (mc.name.empty()) {
            throw ConfigError("config: model names must be non-empty");
        }
        if (!names.insert(mc.name).second) {
            throw ConfigError("config: duplicate model name \"" + mc.name + "\"");
        }
        build_model(mc);
    }
    if (checkpoints.empty()) {
        throw ConfigError("config: checkpoints must be non-empty");
    }
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] == 0) {
            throw ConfigError("config: checkpoints must be positive");
        }
        if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
            throw ConfigError("config: checkpoints must be strictly increasing");
        }
    }
    if (checkpoints.back() > 1000000) {
        throw ConfigError("config: checkpoints may not exceed 1000000");
    }
    if (seeds.empty()) {
        throw ConfigError("config: seeds must be non-empty");
    }
    std::set<std::uint64_t> uniq(seeds.begin(), seeds.end());
    if (uniq.size() != seeds.size()) {
        throw ConfigError("config: seeds must be pairwise distinct");
    }
    if (!(tolerance > 0.0) || !std::isfinite(tolerance)) {
        throw ConfigError("config: tolerance must be positive and finite");
    }
    if (std::isnan(quadrature.tol) || quadrature.tol < 0.0) {
        throw ConfigError("config: quadrature.tol must be >= 0");
    }
    if (quadrature.max_resolution < 2) {
        throw ConfigError("config: quadrature.max_resolution must be at least 2");
    }
    if (outputs.directory.empty()) {
        throw ConfigError("config: outputs.directory must be non-empty");
    }
    if (outputs.formats.empty()) {
        throw ConfigError("config: outputs.formats must be non-empty");
    }
    for (const std::string& f : outputs.formats) {
        if (f != "jsonl" && f != "csv") {
            throw ConfigError("config: outputs.formats entry \"" + f +
                              "\" is not one of jsonl, csv");
        }
    }
    if (kl.n < 100) {
        throw ConfigError("config: kl.n must be at least 100");
    }
    if (kl.replications < 2) {
        throw ConfigError("config: kl.replications must be at least 2");
    }
    if (kl.rho_probes.empty() || kl.sigma_probes.empty()) {
        throw ConfigError("config: kl probe lists must be non-empty");
    }
}

ModelSpec build_model(const ModelConfig& mc) {
    return make_ar1_model(mc.name, make_domain1(mc.rho_intervals), mc.sigma,
                          mc.prior);
}

ExperimentConfig builtin_suite(const std::string& name) {
    ExperimentConfig cfg;
    cfg.suite_name = name;
    cfg.seeds = default_seeds();
    if (name == "paper-stationary-vs-nonstationary") {
        cfg.models = stationary_pair(SigmaSpec::fixed_at(1.0));
        cfg.tolerance = 0.02;
    } else if (name == "paper-unknown-sigma") {
        cfg.models = stationary_pair(SigmaSpec::over(Interval{0.1, 5.0}));
        cfg.tolerance = 0.03;
        // The reported quantity divides log-marginals by n, so a coarse
        // refinement tolerance perturbs it by at most tol/n << tolerance.
        cfg.quadrature.tol = 0.5;
    } else if (name == "nested-both-correct") {
        ModelConfig m1;
        m1.name = "M1";
        m1.rho_intervals = {Interval{-1.0, 1.0, true, true}};
        ModelConfig m1p;
        m1p.name = "M1-positive";
        m1p.rho_intervals = {Interval{0.0, 1.0, true, true}};
        cfg.models = {m1, m1p};
        cfg.tolerance = 0.01;
    } else if (name == "three-model-selection") {
        cfg.models = stationary_pair(SigmaSpec::fixed_at(1.0));
        ModelConfig m3;
        m3.name = "M3";
        m3.rho_intervals = {Interval{-1.5, -1.0, false, false}};
        cfg.models.push_back(m3);
        cfg.tolerance = 0.02;
    } else {
        std::string known;
        for (const std::string& s : builtin_suite_names()) {
            if (!known.empty()) known += ", ";
            known += s;
        }
        throw ConfigError("unknown suite \"" + name + "\"; available: " + known);
    }
    return cfg;
}

std::vector<std::string> builtin_suite_names() {
    return {"paper-stationary-vs-nonstationary", "paper-unknown-sigma",
            "nested-both-correct", "three-model-selection"};
}

ExperimentConfig parse_config(const std::string& text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: parse failed: ") + e.what());
    }
    try {
        expect_keys(j,
                    {"suite", "true_process", "models", "checkpoints", "seeds",
                     "tolerance", "quadrature", "outputs", "kl", "assumptions"},
                    "top level");
        ExperimentConfig cfg;
        cfg.suite_name = j.value("suite", std::string("custom"));
        if (j.contains("true_process")) {
            const ojson& p = j.at("true_process");
            expect_keys(p, {"rho0", "sigma0"}, "true_process");
            cfg.process.rho0 = p.value("rho0", 0.5);
            cfg.process.sigma0 = p.value("sigma0", 1.0);
        }
        if (j.contains("models")) {
            if (!j.at("models").is_array()) {
                throw ConfigError("config: models must be an array");
            }
            std::size_t i = 0;
            for (const ojson& m : j.at("models")) {
                cfg.models.push_back(
                    parse_model(m, "models[" + std::to_string(i) + "]"));
                ++i;
            }
        }
        if (j.contains("checkpoints")) {
            cfg.checkpoints =
                parse_list<std::size_t>(j.at("checkpoints"), "checkpoints");
        }
        if (j.contains("seeds")) {
            cfg.seeds = parse_list<std::uint64_t>(j.at("seeds"), "seeds");
        }
        cfg.tolerance = j.value("tolerance", cfg.tolerance);
        if (j.contains("quadrature")) {
            const ojson& q = j.at("quadrature");
            expect_keys(q, {"rule", "tol", "max_resolution"}, "quadrature");
            cfg.quadrature.rule =
                parse_rule(q.value("rule", std::string("gauss_legendre")));
            cfg.quadrature.tol = q.value("tol", cfg.quadrature.tol);
            cfg.quadrature.max_resolution =
                q.value("max_resolution", cfg.quadrature.max_resolution);
        }
        if (j.contains("outputs")) {
            const ojson& o = j.at("outputs");
            expect_keys(o, {"directory", "formats"}, "outputs");
            cfg.outputs.directory = o.value("directory", cfg.outputs.directory);
            if (o.contains("formats")) {
                cfg.outputs.formats =
                    parse_list<std::string>(o.at("formats"), "outputs.formats");
            }
        }
        if (j.contains("kl")) {
            const ojson& k = j.at("kl");
            expect_keys(k, {"n", "replications", "seed", "rho_probes", "sigma_probes"},
                        "kl");
            cfg.kl.n = k.value("n", cfg.kl.n);
            cfg.kl.replications = k.value("replications", cfg.kl.replications);
            cfg.kl.seed = k.value("seed", cfg.kl.seed);
            if (k.contains("rho_probes")) {
                cfg.kl.rho_probes =
                    parse_list<double>(k.at("rho_probes"), "kl.rho_probes");
            }
            if (k.contains("sigma_probes")) {
                cfg.kl.sigma_probes =
                    parse_list<double>(k.at("sigma_probes"), "kl.sigma_probes");
            }
        }
        if (j.contains("assumptions")) {
            const ojson& a = j.at("assumptions");
            expect_keys(a, {"seed", "a2", "a3", "a4", "a5"}, "assumptions");
            cfg.assumptions.seed = a.value("seed", cfg.assumptions.seed);
            if (a.contains("a2")) {
                const ojson& x = a.at("a2");
                expect_keys(x, {"rho1", "n_list", "replications"}, "assumptions.a2");
                cfg.assumptions.a2.rho1 = x.value("rho1", cfg.assumptions.a2.rho1);
                if (x.contains("n_list")) {
                    cfg.assumptions.a2.n_list = parse_list<std::size_t>(
                        x.at("n_list"), "assumptions.a2.n_list");
                }
                cfg.assumptions.a2.replications =
                    x.value("replications", cfg.assumptions.a2.replications);
            }
            if (a.contains("a3")) {
                const ojson& x = a.at("a3");
                expect_keys(x, {"n_list", "grid_resolution", "sup_threshold"},
                            "assumptions.a3");
                if (x.contains("n_list")) {
                    cfg.assumptions.a3.n_list = parse_list<std::size_t>(
                        x.at("n_list"), "assumptions.a3.n_list");
                }
                cfg.assumptions.a3.grid_resolution =
                    x.value("grid_resolution", cfg.assumptions.a3.grid_resolution);
                cfg.assumptions.a3.sup_threshold =
                    x.value("sup_threshold", cfg.assumptions.a3.sup_threshold);
            }
            if (a.contains("a4")) {
                const ojson& x = a.at("a4");
                expect_keys(x, {"threshold", "grid_resolution"}, "assumptions.a4");
                cfg.assumptions.a4.threshold =
                    x.value("threshold", cfg.assumptions.a4.threshold);
                cfg.assumptions.a4.grid_resolution =
                    x.value("grid_resolution", cfg.assumptions.a4.grid_resolution);
            }
            if (a.contains("a5")) {
                const ojson& x = a.at("a5");
                expect_keys(x, {"alpha", "beta", "t_list"}, "assumptions.a5");
                cfg.assumptions.a5.alpha = x.value("alpha", cfg.assumptions.a5.alpha);
                cfg.assumptions.a5.beta = x.value("beta", cfg.assumptions.a5.beta);
                if (x.contains("t_list")) {
                    cfg.assumptions.a5.t_list = parse_list<std::size_t>(
                        x.at("t_list"), "assumptions.a5.t_list");
                }
            }
        }
        cfg.validate();
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: malformed value: ") + e.what());
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open \"" + path + "\"");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    ojson j;
    j["suite"] = cfg.suite_name;
    j["true_process"] = {{"rho0", cfg.process.rho0}, {"sigma0", cfg.process.sigma0}};
    ojson models = ojson::array();
    for (const ModelConfig& mc : cfg.models) models.push_back(model_json(mc));
    j["models"] = std::move(models);
    j["checkpoints"] = cfg.checkpoints;
    j["seeds"] = cfg.seeds;
    j["tolerance"] = cfg.tolerance;
    j["quadrature"] = {
        {"rule", cfg.quadrature.rule == QuadRule::gauss_legendre ? "gauss_legendre"
                                                                 : "midpoint"},
        {"tol", cfg.quadrature.tol},
        {"max_resolution", cfg.quadrature.max_resolution}};
    j["outputs"] = {{"directory", cfg.outputs.directory},
                    {"formats", cfg.outputs.formats}};
    j["kl"] = {{"n", cfg.kl.n},
               {"replications", cfg.kl.replications},
               {"seed", cfg.kl.seed},
               {"rho_probes", cfg.kl.rho_probes},
               {"sigma_probes", cfg.kl.sigma_probes}};
    j["assumptions"] = {
        {"seed", cfg.assumptions.seed},
        {"a2",
         {{"rho1", cfg.assumptions.a2.rho1},
          {"n_list", cfg.assumptions.a2.n_list},
          {"replications", cfg.assumptions.a2.replications}}},
        {"a3",
         {{"n_list", cfg.assumptions.a3.n_list},
          {"grid_resolution", cfg.assumptions.a3.grid_resolution},
          {"sup_threshold", cfg.assumptions.a3.sup_threshold}}},
        {"a4",
         {{"threshold", cfg.assumptions.a4.threshold},
          {"grid_resolution", cfg.assumptions.a4.grid_resolution}}},
        {"a5",
         {{"alpha", cfg.assumptions.a5.alpha},
          {"beta", cfg.assumptions.a5.beta},
          {"t_list", cfg.assumptions.a5.t_list}}}};
    return j.dump(2) + "\n";
}

std::string run_id(const ExperimentConfig& cfg) {
    const std::uint64_t h =
        fnv1a64(serialize_config(cfg) + "|" + kVersionTag);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return std::string(buf);
}

}  // namespace bflim
