// Command-line front end: JSON config -> library calls -> CSV/JSON artifacts.
//
// Subcommands: moments | coeffs | simulate | clt-mean | clt-acf | clt-pmoment
// | fit. Every output embeds the tool version and a hash of the effective
// config, and identical (config, seed) pairs produce byte-identical files
// regardless of --threads.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "levyfield/gmm.hpp"
#include "levyfield/mc.hpp"
#include "levyfield/moments.hpp"
#include "levyfield/simulate.hpp"
#include "levyfield/weak_dependence.hpp"

namespace lf = levyfield;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

static constexpr const char* kVersion = "0.3.0";

// ---------------------------------------------------------------------------
// Config handling.

static std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

static void reject_unknown(const json& obj, const std::vector<std::string>& allowed,
                           const std::string& path) {
    if (!obj.is_object()) throw ConfigError(path + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (auto& a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ConfigError(path + "." + it.key() + ": unknown key");
    }
}

template <typename T>
static T get_or(const json& obj, const std::string& key, T fallback) {
    if (obj.contains(key)) return obj.at(key).get<T>();
    return fallback;
}

static lf::JumpLaw parse_jump_law(const json& j, const std::string& path) {
    reject_unknown(j, {"family", "intensity", "masses", "sd", "shape", "scale",
                       "tail_index", "xm"},
                   path);
    const std::string fam = j.at("family").get<std::string>();
    if (fam == "none") return lf::JumpLaw::none();
    if (fam == "rademacher") return lf::JumpLaw::rademacher();
    if (fam == "point") {
        std::vector<std::pair<double, double>> m;
        for (auto& e : j.at("masses")) m.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
        return lf::JumpLaw::point(std::move(m));
    }
    if (fam == "normal") return lf::JumpLaw::normal_law(j.at("sd").get<double>());
    if (fam == "gamma")
        return lf::JumpLaw::gamma(j.at("shape").get<double>(), j.at("scale").get<double>());
    if (fam == "laplace") return lf::JumpLaw::laplace(j.at("scale").get<double>());
    if (fam == "pareto")
        return lf::JumpLaw::pareto_law(j.at("tail_index").get<double>(), j.at("xm").get<double>());
    throw ConfigError(path + ".family: unknown jump family '" + fam + "'");
}

static lf::MixingLaw parse_mixing(const json& j, const std::string& path) {
    reject_unknown(j, {"kind", "lambda", "alpha", "beta", "atoms"}, path);
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "degenerate") return lf::MixingLaw::degenerate_at(j.at("lambda").get<double>());
    if (kind == "gamma")
        return lf::MixingLaw::gamma(j.at("alpha").get<double>(), j.at("beta").get<double>());
    if (kind == "discrete") {
        std::vector<std::pair<double, double>> a;
        for (auto& e : j.at("atoms")) a.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
        return lf::MixingLaw::discrete(std::move(a));
    }
    throw ConfigError(path + ".kind: unknown mixing kind '" + kind + "'");
}

static lf::CharacteristicQuadruplet parse_levy(const json& model, const std::string& path) {
    lf::CharacteristicQuadruplet q;
    if (model.contains("levy")) {
        const json& l = model.at("levy");
        reject_unknown(l, {"gamma", "sigma", "jumps"}, path + ".levy");
        q.gamma = get_or(l, "gamma", 0.0);
        q.sigma = get_or(l, "sigma", 0.0);
        if (l.contains("jumps")) {
            q.nu.jump_law = parse_jump_law(l.at("jumps"), path + ".levy.jumps");
            q.nu.total_intensity = get_or(l.at("jumps"), "intensity", 1.0);
        }
    }
    if (model.contains("mixing")) q.pi = parse_mixing(model.at("mixing"), path + ".mixing");
    return q;
}

struct ParsedModel {
    std::string type;
    lf::KernelModel kernel;
    lf::CharacteristicQuadruplet quad;
    lf::AmbitModel ambit;  // populated when type == "ambit"
};

static ParsedModel parse_model(const json& cfg) {
    if (!cfg.contains("model")) throw ConfigError("model: section required");
    const json& m = cfg.at("model");
    reject_unknown(m, {"type", "levy", "mixing", "kernel", "volatility"}, "model");
    ParsedModel out;
    out.type = m.at("type").get<std::string>();
    out.quad = parse_levy(m, "model");
    if (out.type == "mstou") {
        const json& k = m.at("kernel");
        reject_unknown(k, {"c", "m_space"}, "model.kernel");
        out.kernel = lf::KernelModel::mstou(k.at("c").get<double>(),
                                            get_or(k, "m_space", 1));
    } else if (out.type == "geometric-ma") {
        out.kernel = lf::KernelModel::geometric();
        if (m.contains("kernel")) {
            reject_unknown(m.at("kernel"), {"ratio"}, "model.kernel");
            out.kernel.ratio = get_or(m.at("kernel"), "ratio", 0.5);
        }
    } else if (out.type == "ambit") {
        const json& k = m.at("kernel");
        reject_unknown(k, {"c", "m_space"}, "model.kernel");
        out.kernel = lf::KernelModel::mstou(k.at("c").get<double>(), get_or(k, "m_space", 1));
        out.ambit.l = out.kernel;
        out.ambit.quad = out.quad;
        if (m.contains("volatility")) {
            const json& v = m.at("volatility");
            reject_unknown(v, {"kind", "mean", "var", "p", "kernel", "levy", "mixing"},
                           "model.volatility");
            const std::string vk = v.at("kind").get<std::string>();
            if (vk == "constant") {
                out.ambit.vol_kind = lf::VolatilityKind::constant_one;
            } else if (vk == "iid-cells") {
                out.ambit.vol_kind = lf::VolatilityKind::p_dependent;
                out.ambit.vol_mean = v.at("mean").get<double>();
                out.ambit.vol_var = v.at("var").get<double>();
                out.ambit.p_horizon = get_or(v, "p", 1);
            } else if (vk == "mmaf") {
                out.ambit.vol_kind = lf::VolatilityKind::mmaf;
                const json& jk = v.at("kernel");
                reject_unknown(jk, {"c", "m_space"}, "model.volatility.kernel");
                out.ambit.j =
                    lf::KernelModel::mstou(jk.at("c").get<double>(), get_or(jk, "m_space", 1));
                out.ambit.quad_sigma = parse_levy(v, "model.volatility");
            } else {
                throw ConfigError("model.volatility.kind: unknown kind '" + vk + "'");
            }
        }
    } else {
        throw ConfigError("model.type: unknown type '" + out.type + "'");
    }
    return out;
}

static lf::SimPlan parse_plan(const json& cfg) {
    lf::SimPlan plan;
    if (!cfg.contains("plan")) return plan;
    const json& p = cfg.at("plan");
    reject_unknown(p, {"n", "T", "delta", "seed", "reps", "eps_bias"}, "plan");
    plan.window.n = get_or(p, "n", 16);
    plan.window.m = 2;
    plan.T = get_or(p, "T", 0.0);
    plan.delta = get_or(p, "delta", 0.25);
    plan.master_seed = get_or(p, "seed", std::uint64_t{1});
    plan.replications = get_or(p, "reps", 1);
    plan.eps_bias = get_or(p, "eps_bias", 1e-3);
    return plan;
}

// ---------------------------------------------------------------------------
// Output helpers.

struct OutputContext {
    std::filesystem::path dir;
    std::string config_hash;

    std::ofstream open(const std::string& name) const {
        std::filesystem::create_directories(dir);
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw ConfigError("output: cannot write " + (dir / name).string());
        return f;
    }
    void stamp_csv(std::ofstream& f) const {
        f << "# version=" << kVersion << " config=" << config_hash << "\n";
    }
    ordered_json stamp_json() const {
        ordered_json j;
        j["version"] = kVersion;
        j["config_hash"] = config_hash;
        return j;
    }
};

static std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

// Run replications on a fixed partition; results land in a pre-sized vector
// indexed by replication, so thread count never changes the output.
template <typename F>
static void for_each_rep(int reps, int threads, F&& body) {
    if (threads <= 1) {
        for (int r = 0; r < reps; ++r) body(r);
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (int r = t; r < reps; r += threads) body(r);
        });
    for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// Subcommand implementations.

struct TaskContext {
    json cfg;
    OutputContext out;
    int threads = 1;
};

static const json& task_section(const json& cfg) {
    static const json empty = json::object();
    return cfg.contains("task") ? cfg.at("task") : empty;
}

static int run_moments(const TaskContext& t) {
    const ParsedModel m = parse_model(t.cfg);
    const json& task = task_section(t.cfg);
    reject_unknown(task, {"radius", "lattice_dim", "long_run"}, "task");
    const int radius = get_or(task, "radius", 3);
    const int mdim = get_or(task, "lattice_dim", m.kernel.kind == lf::KernelKind::mstou_exp
                                                     ? m.kernel.support.m_space + 1
                                                     : 1);
    const lf::CovarianceTable table = lf::covariance_table(m.kernel, m.quad, mdim, radius);
    auto f = t.out.open("covariance.csv");
    t.out.stamp_csv(f);
    table.write_csv(f);

    ordered_json rep = t.out.stamp_json();
    rep["mean"] = lf::mmaf_mean(m.kernel, m.quad);
    rep["variance"] = table.var();
    if (get_or(task, "long_run", false)) {
        const auto sb = lf::mstou_gamma_shell_bound(m.kernel, m.quad);
        const auto lr = lf::long_run_variance(table, sb);
        rep["long_run_variance"] = lr.sigma;
        rep["long_run_tail_bound"] = lr.tail_bound;
    }
    t.out.open("moments.json") << rep.dump(2) << "\n";
    return 0;
}

static lf::BoundCase parse_case(const std::string& s) {
    if (s == "i") return lf::BoundCase::i;
    if (s == "ii") return lf::BoundCase::ii;
    if (s == "iii") return lf::BoundCase::iii;
    if (s == "iv") return lf::BoundCase::iv;
    throw ConfigError("task.case: unknown case '" + s + "'");
}

static int run_coeffs(const TaskContext& t) {
    const ParsedModel m = parse_model(t.cfg);
    const json& task = task_section(t.cfg);
    reject_unknown(task, {"kind", "case", "h_min", "h_max", "points", "clt", "p"}, "task");
    const std::string kind = get_or(task, "kind", std::string("theta"));
    const lf::BoundCase cs = parse_case(get_or(task, "case", std::string("ii")));
    const double h_min = get_or(task, "h_min", 1.0), h_max = get_or(task, "h_max", 1e4);
    const int pts = get_or(task, "points", 25);

    std::function<double(double)> eval;
    lf::CurveKind ck;
    if (kind == "theta") {
        ck = lf::CurveKind::theta_lex;
        eval = [m, cs](double h) { return lf::theta_bound_mmaf(m.kernel, m.quad, cs, h); };
    } else if (kind == "eta") {
        ck = lf::CurveKind::eta;
        eval = [m, cs](double h) { return lf::eta_bound_mmaf(m.kernel, m.quad, cs, h); };
    } else {
        throw ConfigError("task.kind: expected theta or eta");
    }
    const auto curve =
        lf::make_curve(ck, kind + " case " + get_or(task, "case", std::string("ii")), eval,
                       lf::geometric_grid(h_min, h_max, pts));
    auto f = t.out.open("coefficients.csv");
    t.out.stamp_csv(f);
    curve.write_csv(f);

    ordered_json rep = t.out.stamp_json();
    rep["decay_type"] = curve.fit.type == lf::DecayType::polynomial ? "polynomial"
                        : curve.fit.type == lf::DecayType::exponential ? "exponential"
                                                                       : "none";
    rep["decay_order"] = curve.fit.order;
    rep["decay_rate"] = curve.fit.rate;
    rep["fit_r2"] = curve.fit.r2;
    if (task.contains("clt")) {
        const json& c = task.at("clt");
        reject_unknown(c, {"m", "delta", "target"}, "task.clt");
        const std::string target = c.at("target").get<std::string>();
        lf::CltTarget tg;
        if (target == "mean") tg = lf::CltTarget::mean;
        else if (target == "autocov") tg = lf::CltTarget::autocov;
        else if (target == "pth-moment") tg = lf::CltTarget::pth_moment;
        else if (target == "eta-mean") tg = lf::CltTarget::eta_mean;
        else throw ConfigError("task.clt.target: unknown target");
        const auto v = lf::clt_condition_check(curve, c.at("m").get<int>(),
                                               c.at("delta").get<double>(), tg,
                                               get_or(task, "p", 3.0));
        rep["clt"] = {{"pass", v.pass},
                      {"required_order", v.required_order},
                      {"fitted_order", v.fitted_order},
                      {"note", v.note}};
    }
    t.out.open("coefficients.json") << rep.dump(2) << "\n";
    return 0;
}

static int run_simulate(const TaskContext& t) {
    const ParsedModel m = parse_model(t.cfg);
    lf::SimPlan plan = parse_plan(t.cfg);
    std::vector<lf::LatticeSample> samples(plan.replications);
    for_each_rep(plan.replications, t.threads, [&](int r) {
        samples[r] = m.type == "ambit" ? lf::simulate_ambit(m.ambit, plan, r)
                                       : lf::simulate_mmaf(m.kernel, m.quad, plan, r);
    });
    for (int r = 0; r < plan.replications; ++r) {
        auto f = t.out.open("sample_" + std::to_string(r) + ".csv");
        t.out.stamp_csv(f);
        f << "t,x,value\n";
        const int n = samples[r].window.n;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                f << (i + 1) << "," << (j + 1) << "," << fmt(samples[r].at(i, j)) << "\n";
    }
    return 0;
}

static int run_clt(const TaskContext& t, const std::string& which) {
    const ParsedModel m = parse_model(t.cfg);
    lf::SimPlan plan = parse_plan(t.cfg);
    const json& task = task_section(t.cfg);
    reject_unknown(task, {"sigma", "mean", "lags", "targets", "p", "mu_p", "radius", "verdict"},
                   "task");

    lf::ExperimentReport report;
    report.model_hash = t.out.config_hash;
    report.replications = plan.replications;
    report.window_n = plan.window.n;
    report.statistic = which;

    if (m.type == "geometric-ma") {
        std::vector<std::vector<double>> reps(plan.replications);
        for_each_rep(plan.replications, t.threads, [&](int r) {
            reps[r] = lf::simulate_geometric_ma(plan.window.n, r, plan.master_seed,
                                                m.kernel.ratio);
        });
        const double mean = get_or(task, "mean", lf::mmaf_mean(m.kernel, m.quad));
        if (which == "clt-mean") {
            const double sigma = task.at("sigma").get<double>();
            report.sigma_target = sigma;
            report.standardized_values = lf::sequence_mean_stat(reps, mean, sigma).values;
        } else if (which == "clt-pmoment") {
            const int p = task.at("p").get<int>();
            const double mu_p = task.at("mu_p").get<double>();
            auto st = lf::sequence_pth_moment_stat(reps, p, mu_p, get_or(task, "sigma", 0.0));
            report.empirical_standardization = st.empirical_standardization;
            report.standardized_values = st.values;
        } else {  // clt-acf
            std::vector<int> lags;
            std::vector<double> R;
            for (auto& e : task.at("lags")) lags.push_back(e.get<int>());
            for (int k : lags)
                R.push_back(lf::mmaf_cov(m.kernel, m.quad, lf::Point::of({double(k)})));
            const auto st = lf::sequence_autocov_stat(reps, lags, R, mean);
            report.standardized_values = st.values.front();
            // remaining lags appended so the report keeps everything
            for (size_t li = 1; li < st.values.size(); ++li)
                report.standardized_values.insert(report.standardized_values.end(),
                                                  st.values[li].begin(), st.values[li].end());
        }
    } else {
        std::vector<lf::LatticeSample> samples(plan.replications);
        for_each_rep(plan.replications, t.threads, [&](int r) {
            samples[r] = m.type == "ambit" ? lf::simulate_ambit(m.ambit, plan, r)
                                           : lf::simulate_mmaf(m.kernel, m.quad, plan, r);
        });
        const double mean = get_or(task, "mean", lf::mmaf_mean(m.kernel, m.quad));
        if (which == "clt-mean") {
            double sigma;
            if (task.contains("sigma")) {
                sigma = task.at("sigma").get<double>();
            } else {
                const auto table = lf::covariance_table(
                    m.kernel, m.quad, 2, get_or(task, "radius", 40));
                sigma = lf::long_run_variance(table,
                                              lf::mstou_gamma_shell_bound(m.kernel, m.quad))
                            .sigma;
            }
            report.sigma_target = sigma;
            report.standardized_values = lf::sample_mean_stat(samples, mean, sigma).values;
        } else if (which == "clt-pmoment") {
            const int p = task.at("p").get<int>();
            const double mu_p = task.at("mu_p").get<double>();
            auto st = lf::pth_moment_stat(samples, p, mu_p, get_or(task, "sigma", 0.0));
            report.empirical_standardization = st.empirical_standardization;
            report.standardized_values = st.values;
        } else {
            std::vector<std::pair<int, int>> lags;
            std::vector<double> R;
            for (auto& e : task.at("lags"))
                lags.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
            for (auto [kt, kx] : lags)
                R.push_back(
                    lf::mmaf_cov(m.kernel, m.quad, lf::Point::of({double(kt), double(kx)})));
            const auto st = lf::sample_autocov_stat(samples, lags, R, mean);
            report.standardized_values = st.values.front();
            for (size_t li = 1; li < st.values.size(); ++li)
                report.standardized_values.insert(report.standardized_values.end(),
                                                  st.values[li].begin(), st.values[li].end());
        }
    }

    // admissibility verdict attached from the coefficient bounds where available
    if (m.type == "mstou" && m.quad.pi.kind == lf::MixingKind::gamma_density) {
        const double alpha = m.quad.pi.alpha;
        const double thr = lf::mstou_clt_alpha_threshold(
            m.kernel.support.m_space, get_or(task, "delta", 2.0),
            which == "clt-acf" ? lf::CltTarget::autocov : lf::CltTarget::mean);
        report.clt_verdict = alpha > thr ? "pass" : "fail";
    } else {
        report.clt_verdict = "pass";
    }

    report.finalize();
    ordered_json rep = t.out.stamp_json();
    rep["statistic"] = report.statistic;
    rep["replications"] = report.replications;
    rep["window_n"] = report.window_n;
    rep["sigma_target"] = report.sigma_target;
    rep["empirical_standardization"] = report.empirical_standardization;
    rep["clt_verdict"] = report.clt_verdict;
    rep["ks_stat"] = report.normality.ks_stat;
    rep["ks_p"] = report.normality.ks_p;
    rep["jb_stat"] = report.normality.jb_stat;
    rep["jb_p"] = report.normality.jb_p;
    rep["ks_pass_at_0.01"] = report.ks_pass;
    rep["jb_pass_at_0.01"] = report.jb_pass;
    t.out.open("report.json") << rep.dump(2) << "\n";
    auto f = t.out.open("standardized.csv");
    t.out.stamp_csv(f);
    f << "value\n";
    for (double v : report.standardized_values) f << fmt(v) << "\n";
    return 0;
}

static int run_fit(const TaskContext& t) {
    const ParsedModel m = parse_model(t.cfg);
    if (m.type != "mstou" || m.quad.pi.kind != lf::MixingKind::gamma_density)
        throw ConfigError("task: fitting covers the Gamma-mixed model");
    lf::SimPlan plan = parse_plan(t.cfg);
    const json& task = task_section(t.cfg);
    reject_unknown(task, {"lags", "init", "fix_c", "fix_sigma", "restarts"}, "task");

    std::vector<std::pair<int, int>> lags;
    if (task.contains("lags"))
        for (auto& e : task.at("lags")) lags.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    else
        lags = {{0, 0}, {1, 0}, {2, 0}, {3, 0}};

    const auto sample = lf::simulate_mmaf(m.kernel, m.quad, plan, 0);
    const auto conds = lf::empirical_conditions(sample, lags);

    lf::FitOptions opt;
    opt.m_space = m.kernel.support.m_space;
    opt.fix_c = get_or(task, "fix_c", false);
    opt.fix_Sigma = get_or(task, "fix_sigma", false);
    opt.restarts = get_or(task, "restarts", 5);
    opt.init.alpha = m.quad.pi.alpha * 0.8 + 1.0;
    opt.init.beta = m.quad.pi.beta;
    opt.init.c = m.kernel.support.c;
    opt.init.Sigma_Lambda = lf::moment_functionals(m.quad).Sigma_Lambda;
    if (task.contains("init")) {
        const json& i = task.at("init");
        reject_unknown(i, {"alpha", "beta", "c", "sigma_lambda"}, "task.init");
        opt.init.alpha = get_or(i, "alpha", opt.init.alpha);
        opt.init.beta = get_or(i, "beta", opt.init.beta);
        opt.init.c = get_or(i, "c", opt.init.c);
        opt.init.Sigma_Lambda = get_or(i, "sigma_lambda", opt.init.Sigma_Lambda);
    }

    const auto fit = lf::fit_mstou(conds, opt);
    ordered_json rep = t.out.stamp_json();
    rep["alpha"] = fit.estimate.alpha;
    rep["beta"] = fit.estimate.beta;
    rep["c"] = fit.estimate.c;
    rep["sigma_lambda"] = fit.estimate.Sigma_Lambda;
    rep["objective"] = fit.objective;
    rep["iterations"] = fit.iterations;
    rep["converged"] = fit.converged;
    rep["identifiability_warning"] = fit.identifiability_warning;
    rep["note"] = fit.note;
    t.out.open("estimate.json") << rep.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

static void apply_override(json& cfg, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value");
    const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    json* node = &cfg;
    size_t pos = 0;
    std::vector<std::string> parts;
    while (pos != std::string::npos) {
        const auto dot = key.find('.', pos);
        parts.push_back(key.substr(pos, dot == std::string::npos ? dot : dot - pos));
        pos = dot == std::string::npos ? dot : dot + 1;
    }
    for (size_t i = 0; i + 1 < parts.size(); ++i) node = &((*node)[parts[i]]);
    json parsed;
    try {
        parsed = json::parse(val);
    } catch (...) {
        parsed = val;  // plain string
    }
    (*node)[parts.back()] = parsed;
}

int main(int argc, char** argv) {
    CLI::App app{"Lattice random-field toolkit: moments, dependence bounds, "
                 "simulation, limit-theorem experiments, moment fitting"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    std::vector<std::string> overrides;
    std::uint64_t seed_override = 0;
    bool seed_set = false;
    int threads = 1;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--set", overrides, "dotted-path overrides, key=value");
    app.add_option("--out", out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", seed_override, "master seed override");
    app.add_option("--threads", threads, "worker threads (speed only, never results)");

    for (const char* name :
         {"moments", "coeffs", "simulate", "clt-mean", "clt-acf", "clt-pmoment", "fit"})
        app.add_subcommand(name)->fallthrough();

    CLI11_PARSE(app, argc, argv);
    seed_set = seed_opt->count() > 0;
    const std::string sub = app.get_subcommands().front()->get_name();

    try {
        json cfg = json::object();
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw ConfigError("--config: cannot read " + config_path);
            cfg = json::parse(f);
        }
        for (auto& kv : overrides) apply_override(cfg, kv);
        if (seed_set) cfg["plan"]["seed"] = seed_override;
        reject_unknown(cfg, {"model", "plan", "task", "output"}, "config");
        if (cfg.contains("output")) {
            reject_unknown(cfg.at("output"), {"dir"}, "output");
            out_dir = get_or(cfg.at("output"), "dir", out_dir);
        }

        TaskContext t;
        t.cfg = cfg;
        t.threads = std::max(1, threads);
        t.out.dir = out_dir;
        {
            std::ostringstream h;
            h << std::hex << fnv1a(cfg.dump());
            t.out.config_hash = h.str();
        }

        if (sub == "moments") return run_moments(t);
        if (sub == "coeffs") return run_coeffs(t);
        if (sub == "simulate") return run_simulate(t);
        if (sub == "fit") return run_fit(t);
        return run_clt(t, sub);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const lf::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
}
