#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gfbp/combinat.hpp"
#include "gfbp/errors.hpp"
#include "gfbp/format.hpp"
#include "gfbp/model_io.hpp"
#include "gfbp/oracle.hpp"
#include "gfbp/pmf.hpp"
#include "gfbp/rates.hpp"
#include "gfbp/simulate.hpp"
#include "gfbp/special.hpp"

namespace gfbp::cli {

namespace {

using json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

double to_number(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw InputError(what + ": \"" + s + "\" is not a number");
}

std::optional<std::vector<double>> number_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& part : split(s, ',')) {
        try {
            out.push_back(to_number(part, "list"));
        } catch (const InputError&) {
            return std::nullopt;
        }
    }
    if (out.empty()) return std::nullopt;
    return out;
}

std::vector<double> parse_grid(const std::string& spec) {
    auto parts = split(spec, ':');
    if (parts.size() != 3) throw InputError("grid must be start:stop:step, got \"" + spec + "\"");
    const double start = to_number(parts[0], "grid start");
    const double stop = to_number(parts[1], "grid stop");
    const double step = to_number(parts[2], "grid step");
    if (!(start >= 0.0) || !(stop >= start) || !(step > 0.0))
        throw InputError("grid needs 0 <= start <= stop and step > 0");
    const double count = std::floor((stop - start) / step + 1e-9);
    if (count > 1e7) throw InputError("grid has too many points");
    std::vector<double> out;
    for (int i = 0; i <= static_cast<int>(count); ++i) out.push_back(start + i * step);
    return out;
}

struct ModelArgs {
    std::string file;
    std::string preset;
    std::string lambda;
    std::string lambdas;
    std::string rates;
    std::string rate;
    std::string beta;
    std::string total;
    std::string n0;
    std::string k;

    void add(CLI::App* app) {
        app->add_option("--model", file, "rate-model JSON file");
        app->add_option("--preset", preset, "tfpp, fpbp, gfcp, cfpp, stfpp or formula");
        app->add_option("--lambda", lambda, "rate of tfpp and stfpp");
        app->add_option("--lambdas", lambdas, "comma-separated rates of gfcp");
        app->add_option("--rates", rates, "fpbp rates: comma-separated list or formula in n; formula: per-jump formulas");
        app->add_option("--rate", rate, "rate formula in n and i");
        app->add_option("--beta", beta, "stfpp index or cfpp beta(i) formula");
        app->add_option("--total", total, "exact total-rate formula for unbounded formula models");
        app->add_option("--n0", n0, "initial state");
        app->add_option("--k", k, "largest jump, or \"unbounded\"");
    }

    json document() const {
        json d;
        d["kind"] = "preset";
        d["name"] = preset;
        auto set_num = [&](const char* key, const std::string& v) {
            if (!v.empty()) d[key] = to_number(v, std::string("--") + key);
        };
        if (preset == "formula") {
            d["kind"] = "formula";
            d.erase("name");
        }
        if (!n0.empty()) d["n0"] = static_cast<long long>(to_number(n0, "--n0"));
        if (!k.empty()) {
            if (k == "unbounded")
                d["k"] = "unbounded";
            else
                d["k"] = static_cast<long long>(to_number(k, "--k"));
        }
        set_num("lambda", lambda);
        if (!lambdas.empty()) {
            auto list = number_list(lambdas);
            if (!list) throw InputError("--lambdas must be a comma-separated list of numbers");
            d["lambdas"] = *list;
        }
        if (!rates.empty()) {
            if (auto list = number_list(rates); list && preset == "fpbp")
                d["rates"] = *list;
            else if (preset == "formula")
                d["rates"] = split(rates, ',');
            else
                d["rate"] = rates;
        }
        if (!rate.empty()) d["rate"] = rate;
        if (!beta.empty()) {
            if (preset == "stfpp")
                d["beta"] = to_number(beta, "--beta");
            else
                d["beta"] = beta;
        }
        if (!total.empty()) d["total"] = total;
        return d;
    }

    RateModel model() const {
        if (!file.empty() && !preset.empty()) throw InputError("give either --model or --preset, not both");
        if (!file.empty()) return parse_model(read_file(file));
        if (preset.empty()) throw InputError("a model is required: --model FILE or --preset NAME");
        return parse_model(document().dump());
    }
};

struct OrderArgs {
    std::string alpha;
    std::string per_state_file;

    void add(CLI::App* app) {
        auto* a = app->add_option("--alpha", alpha, "constant fractional order in (0, 1]");
        auto* p = app->add_option("--alpha-per-state", per_state_file, "order JSON file");
        a->excludes(p);
    }

    OrderSpec order() const {
        if (!per_state_file.empty()) return parse_order(read_file(per_state_file));
        if (alpha.empty()) throw InputError("--alpha or --alpha-per-state is required");
        return OrderSpec::constant(to_number(alpha, "--alpha"));
    }
};

json model_json(const RateModel& model) {
    try {
        return json::parse(serialize_model(model));
    } catch (const std::logic_error&) {
        return nullptr;
    }
}

struct Output {
    std::string path;
    std::unique_ptr<std::ofstream> file;
    std::ostream* stream = nullptr;

    Output(const std::string& p, std::ostream& fallback) : path(p) {
        if (path.empty() || path == "-") {
            stream = &fallback;
            path.clear();
        } else {
            file = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file) throw InputError("cannot write " + path);
            stream = file.get();
        }
    }
    std::ostream& operator*() { return *stream; }
};

class Manifest {
public:
    Manifest(std::string command, const std::vector<std::string>& args) : start_(std::chrono::steady_clock::now()) {
        doc_["tool"] = "gfbp";
        doc_["version"] = kVersion;
        doc_["command"] = std::move(command);
        doc_["arguments"] = args;
    }
    json& operator[](const char* key) { return doc_[key]; }

    // Written next to `output` as <output>.manifest.json, or to `explicit_path`.
    void write(const std::string& output, const std::string& explicit_path) {
        std::string path = explicit_path;
        if (path.empty()) {
            if (output.empty()) return;
            path = output + ".manifest.json";
        }
        doc_["wall_clock_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        std::ofstream f(path, std::ios::binary);
        if (!f) throw InputError("cannot write " + path);
        f << doc_.dump(2) << '\n';
    }

private:
    json doc_;
    std::chrono::steady_clock::time_point start_;
};

json order_json(const OrderSpec& order) { return json::parse(serialize_order(order)); }

// ---------------------------------------------------------------------------

struct PmfCmd {
    ModelArgs model;
    OrderArgs order;
    std::string grid;
    double mass_tol = 1e-8;
    long long state_budget = 200000;
    std::string method = "auto";
    std::string format = "csv";
    std::string out;
    std::string manifest;

    void add(CLI::App* app) {
        model.add(app);
        order.add(app);
        app->add_option("--t-grid", grid, "start:stop:step")->required();
        app->add_option("--mass-tol", mass_tol, "stop adding states once the deficit is below this");
        app->add_option("--state-budget", state_budget, "most states per time point");
        app->add_option("--method", method, "auto, patterns or contour");
        app->add_option("--format", format, "csv or json");
        app->add_option("--out", out, "output file (stdout when omitted)");
        app->add_option("--manifest", manifest, "manifest path (default <out>.manifest.json)");
    }

    int run(const std::vector<std::string>& args, std::ostream& stdout_, std::ostream& err) {
        Manifest mf("pmf", args);
        RateModel m = model.model();
        OrderSpec o = order.order();
        auto times = parse_grid(grid);
        TableOptions opts;
        opts.mass_tolerance = mass_tol;
        opts.state_budget = state_budget;
        if (method == "auto")
            opts.method = TableMethod::Auto;
        else if (method == "patterns")
            opts.method = TableMethod::PatternSum;
        else if (method == "contour")
            opts.method = TableMethod::Contour;
        else
            throw InputError("--method must be auto, patterns or contour");
        if (format != "csv" && format != "json") throw InputError("--format must be csv or json");
        PmfTable table = pmf_table(m, o, times, opts);
        Output o_file(out, stdout_);
        if (format == "csv")
            write_csv(table, *o_file);
        else
            write_json(table, *o_file);
        mf["model"] = model_json(m);
        mf["order"] = order_json(o);
        mf["grid"] = grid;
        mf["tolerances"] = {{"mass", mass_tol}, {"state_budget", state_budget}, {"method", method}};
        mf["seed"] = nullptr;
        mf["outputs"] = json::array({o_file.path});
        mf.write(o_file.path, manifest);
        if (table.flagged()) {
            err << "mass tolerance " << mass_tol << " not reached within " << state_budget << " states\n";
            return ToleranceFailure;
        }
        return Ok;
    }
};

struct ValidateCmd {
    ModelArgs model;
    OrderArgs order;
    std::string mode;
    std::string grid = "0:2:0.1";
    double tol = -1.0;
    int states = 0;
    double step = 0.0;
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    std::string s_values = "0.5,1,2";
    double t_min = 0.1;
    unsigned workers = 0;
    bool richardson = false;
    std::string out;

    void add(CLI::App* app) {
        model.add(app);
        order.add(app);
        app->add_option("--mode", mode, "oracle, mc, laplace or residual")->required();
        app->add_option("--t-grid", grid, "start:stop:step");
        app->add_option("--tol", tol, "pass threshold (mode default when omitted)");
        app->add_option("--states", states, "number of states checked from n0");
        app->add_option("--step", step, "solver or residual grid step");
        app->add_option("--samples", samples, "Monte Carlo sample count");
        app->add_option("--seed", seed, "Monte Carlo seed");
        app->add_option("--s", s_values, "comma-separated Laplace variables");
        app->add_option("--t-min", t_min, "start of the residual window");
        app->add_option("--workers", workers, "Monte Carlo worker threads");
        app->add_flag("--richardson", richardson, "oracle mode: also report the observed convergence order");
        app->add_option("--out", out, "report file (stdout when omitted)");
    }

    json run_oracle(const RateModel& m, const OrderSpec& o, const std::vector<double>& times) {
        SolverConfig c;
        c.step = step > 0 ? step : 5e-4;
        c.n_max = (states > 0 ? states : 7) - 1;
        std::vector<double> positive;
        for (double t : times)
            if (t > 0) positive.push_back(t);
        if (positive.empty()) throw InputError("oracle mode needs a positive time");
        const double t_end = positive.back();
        PmfTable solved = solve_fractional_system(m, o, t_end, c);
        PmfTable analytic = pmf_grid(m, o, c.n_max + 1, positive);
        double worst = 0.0;
        json where;
        for (std::size_t q = 0; q < positive.size(); ++q) {
            const PmfColumn& col = column_at(solved, positive[q]);
            for (std::size_t j = 0; j < col.p.size(); ++j) {
                double d = std::fabs(col.p[j] - analytic.columns[q].p[j]);
                if (d > worst) {
                    worst = d;
                    where = {{"t", positive[q]}, {"n", m.n0() + static_cast<State>(j)}};
                }
            }
        }
        json r = {{"max_deviation", worst}, {"at", where}, {"step", c.step}, {"states", c.n_max + 1}};
        if (richardson) {
            auto rr = richardson_order(m, o, t_end, c, positive);
            r["richardson_order"] = rr.order;
        }
        return r;
    }

    json run_mc(const RateModel& m, const OrderSpec& o, const std::vector<double>& times, bool& passed) {
        if (!o.is_constant() || (o.constant_alpha() != 1.0 && o.constant_alpha() != 0.5))
            throw InputError("mc mode supports the constant orders 1 and 0.5 only");
        const double a = o.constant_alpha();
        EnsembleConfig ec;
        ec.seed = seed;
        ec.samples = samples;
        ec.workers = workers;
        std::vector<double> positive;
        for (double t : times)
            if (t > 0) positive.push_back(t);
        if (positive.empty()) throw InputError("mc mode needs a positive time");
        std::vector<SamplePath> paths;
        if (a == 1.0) paths = simulate_ensemble(m, positive.back(), ec);
        json cols = json::array();
        double worst = 0.0;
        for (double t : positive) {
            std::vector<State> st;
            if (a == 1.0) {
                st = states_at(paths, t);
            } else {
                for (const auto& h : sample_half_ensemble(m, t, ec)) st.push_back(h.state);
            }
            EmpiricalPmf emp = empirical_pmf(st);
            double ts[] = {t};
            PmfTable ref = pmf_table(m, o, ts);
            PmfComparison cmp = compare_pmf(emp, ref.columns[0].p, ref.n0);
            worst = std::max(worst, cmp.total_variation);
            if (!cmp.outside_bands.empty()) passed = false;
            cols.push_back({{"t", t},
                            {"total_variation", cmp.total_variation},
                            {"states_checked", cmp.checked},
                            {"outside_wilson_99", cmp.outside_bands}});
        }
        return {{"max_deviation", worst}, {"samples", samples}, {"seed", seed}, {"times", cols}};
    }

    json run_laplace(const RateModel& m, const OrderSpec& o) {
        auto s_list = number_list(s_values);
        if (!s_list) throw InputError("--s must be a comma-separated list of numbers");
        const int count = states > 0 ? states : 5;
        double worst = 0.0;
        json rows = json::array();
        for (double s : *s_list) {
            if (!(s > 0)) throw InputError("Laplace variables must be positive");
            const double t_cut = std::max(1.0, std::log(1e10 / s) / s);
            for (int j = 0; j < count; ++j) {
                const State n = m.n0() + j;
                auto f = [&](double t) { return evaluate_pmf(m, o, n, t).value; };
                Approx num = numeric_laplace(f, s, t_cut);
                double an = pmf_laplace(m, o, n, s);
                double d = std::fabs(num.value - an);
                worst = std::max(worst, d);
                rows.push_back({{"s", s}, {"n", n}, {"analytic", an}, {"numeric", num.value}, {"deviation", d}});
            }
        }
        return {{"max_deviation", worst}, {"values", rows}};
    }

    json run_residual(const RateModel& m, const OrderSpec& o, const std::vector<double>& times) {
        const double h = step > 0 ? step : 1e-3;
        const double t_max = times.back();
        if (!(t_max > t_min)) throw InputError("residual window is empty");
        std::vector<double> grid_pts = parse_grid("0:" + format_number(t_max) + ":" + format_number(h));
        PmfTable table = pmf_grid(m, o, states > 0 ? states : 8, grid_pts);
        ResidualOptions ro;
        ro.t_min = t_min;
        ro.t_max = t_max;
        ResidualReport rep = caputo_residual(m, o, table, ro);
        double worst = *std::max_element(rep.sup_residual.begin(), rep.sup_residual.end());
        return {{"max_deviation", worst},
                {"step", rep.step},
                {"coarse_grid", rep.coarse_grid},
                {"sup_residual", rep.sup_residual}};
    }

    int run(const std::vector<std::string>& args, std::ostream& stdout_, std::ostream&) {
        RateModel m = model.model();
        OrderSpec o = order.order();
        auto times = parse_grid(grid);
        bool passed = true;
        json r;
        double default_tol = 0;
        if (mode == "oracle") {
            default_tol = 1e-5;
            r = run_oracle(m, o, times);
        } else if (mode == "mc") {
            default_tol = 0.01;
            r = run_mc(m, o, times, passed);
        } else if (mode == "laplace") {
            default_tol = 1e-6;
            r = run_laplace(m, o);
        } else if (mode == "residual") {
            default_tol = 1e-4;
            r = run_residual(m, o, times);
        } else {
            throw InputError("--mode must be oracle, mc, laplace or residual");
        }
        const double threshold = tol > 0 ? tol : default_tol;
        passed = passed && r["max_deviation"].get<double>() < threshold;
        json report;
        report["mode"] = mode;
        report["passed"] = passed;
        report["tolerance"] = threshold;
        for (auto& [key, value] : r.items()) report[key] = value;
        report["model"] = model_json(m);
        report["order"] = order_json(o);
        report["arguments"] = args;
        Output o_file(out, stdout_);
        *o_file << report.dump(2) << '\n';
        return passed ? Ok : ToleranceFailure;
    }
};

struct SimulateCmd {
    ModelArgs model;
    double horizon = 1.0;
    std::size_t paths = 1000;
    std::uint64_t seed = 0;
    double alpha = 1.0;
    unsigned workers = 0;
    std::size_t max_events = 1'000'000;
    std::string out;
    std::string summary;
    std::string manifest;

    void add(CLI::App* app) {
        model.add(app);
        app->add_option("--horizon", horizon, "end time (order 1) or observation time (order 0.5)")->required();
        app->add_option("--paths", paths, "number of samples");
        app->add_option("--seed", seed, "64-bit seed");
        app->add_option("--alpha", alpha, "1 for jump-chain paths, 0.5 for the Brownian-clock sampler");
        app->add_option("--workers", workers, "worker threads (capped by GFBP_THREADS)");
        app->add_option("--max-events", max_events, "event guard per path");
        app->add_option("--out", out, "JSON lines output (stdout when omitted)");
        app->add_option("--summary", summary, "CSV of the empirical pmf at the horizon");
        app->add_option("--manifest", manifest, "manifest path (default <out>.manifest.json)");
    }

    int run(const std::vector<std::string>& args, std::ostream& stdout_, std::ostream& err) {
        if (alpha != 1.0 && alpha != 0.5) throw InputError("--alpha must be 1 or 0.5");
        if (paths == 0) throw InputError("--paths must be positive");
        Manifest mf("simulate", args);
        RateModel m = model.model();
        EnsembleConfig ec;
        ec.seed = seed;
        ec.samples = paths;
        ec.workers = workers;
        ec.simulation.max_events = max_events;
        Output o_file(out, stdout_);
        std::vector<State> finals;
        std::size_t guard_hits = 0;
        if (alpha == 1.0) {
            auto ps = simulate_ensemble(m, horizon, ec);
            write_paths_jsonl(ps, *o_file);
            for (const auto& p : ps) {
                finals.push_back(p.final_state());
                guard_hits += p.guard_hit;
            }
        } else {
            for (const auto& h : sample_half_ensemble(m, horizon, ec)) {
                *o_file << "{\"t\":" << format_json_number(horizon) << ",\"clock\":" << format_json_number(h.clock)
                        << ",\"n\":" << h.state << ",\"guard_hit\":" << (h.guard_hit ? "true" : "false") << "}\n";
                finals.push_back(h.state);
                guard_hits += h.guard_hit;
            }
        }
        json outputs = json::array({o_file.path});
        if (!summary.empty()) {
            std::ofstream s(summary, std::ios::binary);
            if (!s) throw InputError("cannot write " + summary);
            write_empirical_csv(empirical_pmf(finals), s);
            outputs.push_back(summary);
        }
        mf["model"] = model_json(m);
        mf["order"] = {{"alpha", alpha}};
        mf["grid"] = {{"horizon", horizon}};
        mf["tolerances"] = {{"max_events", max_events}};
        mf["seed"] = seed;
        mf["outputs"] = outputs;
        mf.write(o_file.path, manifest);
        if (guard_hits) {
            err << guard_hits << " path(s) hit the event guard of " << max_events << " events\n";
            return BudgetFailure;
        }
        return Ok;
    }
};

struct ThetaCmd {
    int n = 0;
    int k = 0;
    bool count_only = false;

    void add(CLI::App* app) {
        app->add_option("n", n, "levels")->required();
        app->add_option("k", k, "largest jump")->required();
        app->add_flag("--count", count_only, "print only the number of patterns");
    }

    int run(std::ostream& out) {
        if (n < 1 || k < 1) throw InputError("n and k must be at least 1");
        if (count_only) {
            out << theta_count(n, k) << '\n';
            return Ok;
        }
        const std::uint64_t count = theta_count(n, k);
        if (count > 2'000'000) throw BudgetExceeded("pattern set too large to print", count, 2'000'000);
        auto set = enumerate_theta(n, k);
        out << '[';
        for (std::size_t p = 0; p < set.size(); ++p) {
            if (p) out << ',';
            out << '[';
            const auto& e = set[p].entries();
            for (std::size_t j = 0; j < e.size(); ++j) out << (j ? "," : "") << e[j];
            out << ']';
        }
        out << "]\n";
        return Ok;
    }
};

struct ExplosionCmd {
    ModelArgs model;
    int terms = 10000;

    void add(CLI::App* app) {
        model.add(app);
        app->add_option("--terms", terms, "number of series terms M");
    }

    int run(std::ostream& out) {
        RateModel m = model.model();
        ExplosionReport r = explosion_check(m, terms);
        json doc = {{"verdict", to_string(r.verdict)},
                    {"terms", terms},
                    {"partial_sum", r.partial_sums.empty() ? 0.0 : r.partial_sums.back()},
                    {"growth_exponent", r.growth_exponent},
                    {"decay_exponent", r.decay_exponent}};
        out << doc.dump(2) << '\n';
        return Ok;
    }
};

struct MlEvalCmd {
    double alpha = 1.0;
    std::vector<double> z;

    void add(CLI::App* app) {
        app->add_option("--alpha", alpha, "order in (0, 1]")->required();
        app->add_option("--z", z, "arguments")->required()->delimiter(',');
    }

    int run(std::ostream& out) {
        out << "alpha,z,value,error,reduced_accuracy\n";
        for (double x : z) {
            Approx a = mittag_leffler(alpha, x);
            out << format_number(alpha) << ',' << format_number(x) << ',' << format_number(a.value) << ','
                << format_number(a.error) << ',' << (a.reduced_accuracy ? 1 : 0) << '\n';
        }
        return Ok;
    }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fractional generalized birth processes: pmf tables, oracles, simulation"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    PmfCmd pmf_cmd;
    ValidateCmd validate_cmd;
    SimulateCmd simulate_cmd;
    ThetaCmd theta_cmd;
    ExplosionCmd explosion_cmd;
    MlEvalCmd ml_cmd;
    auto* pmf_app = app.add_subcommand("pmf", "tabulate the pmf on a time grid");
    pmf_cmd.add(pmf_app);
    auto* validate_app = app.add_subcommand("validate", "compare the pmf with an independent method");
    validate_cmd.add(validate_app);
    auto* simulate_app = app.add_subcommand("simulate", "Monte Carlo ensemble");
    simulate_cmd.add(simulate_app);
    auto* theta_app = app.add_subcommand("theta", "list the jump patterns of n levels with jumps up to k");
    theta_cmd.add(theta_app);
    auto* explosion_app = app.add_subcommand("explosion", "numerical non-explosion check");
    explosion_cmd.add(explosion_app);
    auto* ml_app = app.add_subcommand("ml-eval", "Mittag-Leffler function E_alpha(z)");
    ml_cmd.add(ml_app);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Ok;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return Ok;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return Ok;
        }
        err << "error: " << e.what() << '\n';
        return InputFailure;
    }

    try {
        if (pmf_app->parsed()) return pmf_cmd.run(args, out, err);
        if (validate_app->parsed()) return validate_cmd.run(args, out, err);
        if (simulate_app->parsed()) return simulate_cmd.run(args, out, err);
        if (theta_app->parsed()) return theta_cmd.run(out);
        if (explosion_app->parsed()) return explosion_cmd.run(out);
        if (ml_app->parsed()) return ml_cmd.run(out);
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return InputFailure;
    } catch (const BudgetExceeded& e) {
        err << "budget exceeded: " << e.what() << " (needs " << e.required() << ", limit " << e.limit() << ")\n";
        return BudgetFailure;
    } catch (const ConvergenceError& e) {
        err << "tolerance failure: " << e.what() << '\n';
        return ToleranceFailure;
    } catch (const std::domain_error& e) {
        err << "input error: " << e.what() << '\n';
        return InputFailure;
    } catch (const std::invalid_argument& e) {
        err << "input error: " << e.what() << '\n';
        return InputFailure;
    }
    return InputFailure;
}

}  // namespace gfbp::cli
