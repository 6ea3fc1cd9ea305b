#include "levysim/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "levysim/errors.hpp"

namespace levysim::cli {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) parts.push_back(trim(item));
    return parts;
}

double parse_double(const std::string& value, const std::string& field) {
    try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("field " + field + " is not a finite number: \"" + value + "\"",
                          field);
    }
}

long parse_long(const std::string& value, const std::string& field) {
    try {
        size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("field " + field + " is not an integer: \"" + value + "\"", field);
    }
}

bool parse_bool(const std::string& value, const std::string& field) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("field " + field + " is not a boolean: \"" + value + "\"", field);
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file \"" + path + "\"", "config");

    std::map<std::string, std::string> kv;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line.substr(0, line.find_first_of("#;")));
        if (stripped.empty()) continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']') {
                throw ConfigError("malformed section header at line " +
                                      std::to_string(lineno),
                                  "config");
            }
            section = trim(stripped.substr(1, stripped.size() - 2));
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected key = value at line " + std::to_string(lineno),
                              "config");
        }
        const std::string key = section + "." + trim(stripped.substr(0, eq));
        kv[key] = trim(stripped.substr(eq + 1));
    }

    ExperimentConfig cfg;
    cfg.path = path;
    const auto take = [&](const std::string& key) -> std::optional<std::string> {
        const auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    // [measure]
    cfg.measure.kind = take("measure.kind").value_or("cgmy");
    if (cfg.measure.kind == "cgmy") {
        const auto need = [&](const char* key) {
            const auto v = take(std::string("measure.") + key);
            if (!v) throw ConfigError(std::string("missing measure field ") + key, key);
            return parse_double(*v, key);
        };
        cfg.measure.cgmy.c = need("c");
        cfg.measure.cgmy.alpha = need("alpha");
        cfg.measure.cgmy.lambda_plus = need("lambda_plus");
        cfg.measure.cgmy.lambda_minus = need("lambda_minus");
        if (!(cfg.measure.cgmy.c > 0.0)) throw ConfigError("c must be > 0", "c");
        if (!(cfg.measure.cgmy.alpha > 0.0 && cfg.measure.cgmy.alpha < 2.0)) {
            throw ConfigError("alpha must lie in (0,2)", "alpha");
        }
        if (!(cfg.measure.cgmy.lambda_plus > 0.0)) {
            throw ConfigError("lambda_plus must be > 0", "lambda_plus");
        }
        if (!(cfg.measure.cgmy.lambda_minus > 0.0)) {
            throw ConfigError("lambda_minus must be > 0", "lambda_minus");
        }
    } else if (cfg.measure.kind == "table") {
        const auto file = take("measure.file");
        if (!file) throw ConfigError("measure kind table requires file", "file");
        cfg.measure.table_file = *file;
    } else {
        throw ConfigError("measure kind must be cgmy or table", "kind");
    }

    // [model]
    if (const auto v = take("model.gamma0")) cfg.model.gamma0 = parse_double(*v, "gamma0");
    if (const auto v = take("model.sigma0")) cfg.model.sigma0 = parse_double(*v, "sigma0");
    if (const auto v = take("model.h")) cfg.model.h_kind = *v;
    if (const auto v = take("model.x0")) cfg.model.x0 = parse_double(*v, "x0");
    if (const auto v = take("model.martingale")) {
        cfg.model.martingale = parse_bool(*v, "martingale");
    }
    if (const auto v = take("model.mu_z")) cfg.model.mu_z = parse_double(*v, "mu_z");
    if (cfg.model.h_kind != "linear" && cfg.model.h_kind != "constant") {
        throw ConfigError("model h must be linear or constant", "h");
    }
    if (!(cfg.model.sigma0 >= 0.0)) throw ConfigError("sigma0 must be >= 0", "sigma0");

    // [run]
    if (const auto v = take("run.orders")) {
        cfg.run.orders.clear();
        for (const auto& part : split(*v, ',')) {
            const long order = parse_long(part, "orders");
            if (order < 2 || order > 4) {
                throw ConfigError("orders must be a subset of {2,3,4}", "orders");
            }
            cfg.run.orders.push_back(static_cast<int>(order));
        }
        if (cfg.run.orders.empty()) throw ConfigError("orders must not be empty", "orders");
    }
    if (const auto v = take("run.schemes")) {
        cfg.run.schemes.clear();
        for (const auto& part : split(*v, ',')) {
            cfg.run.schemes.push_back(parse_scheme(part));  // throws UnsupportedScheme
        }
        if (cfg.run.schemes.empty()) {
            throw ConfigError("schemes must not be empty", "schemes");
        }
    }
    if (const auto v = take("run.lambdas")) {
        cfg.run.lambdas.clear();
        for (const auto& part : split(*v, ',')) {
            const double lambda = parse_double(part, "lambdas");
            if (!(lambda > 0.0)) throw ConfigError("lambdas must be > 0", "lambdas");
            cfg.run.lambdas.push_back(lambda);
        }
    }
    if (const auto v = take("run.paths")) {
        cfg.run.paths = parse_long(*v, "paths");
        if (cfg.run.paths < 2) throw ConfigError("paths must be >= 2", "paths");
    }
    if (const auto v = take("run.seed")) {
        cfg.run.seed = static_cast<uint64_t>(parse_long(*v, "seed"));
    }
    if (const auto v = take("run.payoff")) {
        if (*v == "identity" || *v == "square") {
            cfg.run.payoff_kind = *v;
        } else if (v->rfind("poly:", 0) == 0) {
            cfg.run.payoff_kind = "poly";
            for (const auto& part : split(v->substr(5), ',')) {
                cfg.run.payoff_coeffs.push_back(parse_double(part, "payoff"));
            }
            if (cfg.run.payoff_coeffs.empty()) {
                throw ConfigError("poly payoff needs coefficients", "payoff");
            }
        } else {
            throw ConfigError("payoff must be identity, square or poly:c0,c1,...",
                              "payoff");
        }
    }
    if (const auto v = take("run.reference")) {
        cfg.run.reference = parse_double(*v, "reference");
    }
    if (const auto v = take("run.substeps")) {
        cfg.run.substeps = static_cast<int>(parse_long(*v, "substeps"));
        if (cfg.run.substeps < 1) throw ConfigError("substeps must be >= 1", "substeps");
    }
    if (const auto v = take("run.match_third_moment")) {
        cfg.run.match_third_moment = parse_bool(*v, "match_third_moment");
    }

    // [output]
    if (const auto v = take("output.out")) cfg.out = *v;

    if (!kv.empty()) {
        throw ConfigError("unknown config key \"" + kv.begin()->first + "\"",
                          kv.begin()->first);
    }
    return cfg;
}

LevyMeasureSpec make_measure(const MeasureConfig& measure) {
    if (measure.kind == "cgmy") return cgmy_measure(measure.cgmy);
    std::ifstream in(measure.table_file);
    if (!in) {
        throw ConfigError("cannot open table file \"" + measure.table_file + "\"", "file");
    }
    std::vector<double> ys, dens;
    std::string line;
    while (std::getline(in, line)) {
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto parts = split(stripped, ',');
        if (parts.size() != 2) {
            throw ConfigError("table rows must be \"y,density\"", "file");
        }
        ys.push_back(parse_double(parts[0], "file"));
        dens.push_back(parse_double(parts[1], "file"));
    }
    return table_measure(std::move(ys), std::move(dens));
}

LevyModel make_model(const ExperimentConfig& config) {
    const LevyMeasureSpec measure = make_measure(config.measure);
    const Coefficient h = (config.model.h_kind == "linear") ? Coefficient::linear(1.0)
                                                            : Coefficient::constant(1.0);
    std::optional<double> mu_z;
    if (!config.model.martingale) mu_z = config.model.mu_z;
    return make_exponential_model(measure, config.model.gamma0, config.model.sigma0, h,
                                  config.model.x0, mu_z);
}

Payoff make_payoff(const RunConfig& run) {
    if (run.payoff_kind == "identity") return [](double x) { return x; };
    if (run.payoff_kind == "square") return [](double x) { return x * x; };
    return [coeffs = run.payoff_coeffs](double x) {
        double acc = 0.0;
        for (size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
        return acc;
    };
}

std::optional<double> closed_form_reference(const ExperimentConfig& config) {
    if (config.model.h_kind != "linear" || !config.model.martingale) return std::nullopt;
    const double x0 = config.model.x0;
    if (config.run.payoff_kind == "identity") {
        return x0 * std::exp(config.model.gamma0);
    }
    if (config.run.payoff_kind == "square") {
        const LevyMeasureSpec measure = make_measure(config.measure);
        const double m2 =
            partial_moment(measure, 2, Region::outside, 0.0, MomentMode::signed_moment);
        return x0 * x0 *
               std::exp(2.0 * config.model.gamma0 +
                        config.model.sigma0 * config.model.sigma0 + m2);
    }
    return std::nullopt;
}

std::string approx_json(const FiniteApprox& approx, double gamma_bar) {
    json atoms = json::array();
    for (const auto& atom : approx.atoms) {
        atoms.push_back(json{{"mass", atom.mass}, {"y", atom.location}});
    }
    const json doc{{"cutoff", approx.cutoff},   {"epsilon", approx.epsilon},
                   {"atoms", atoms},            {"lambda", approx.lambda_total},
                   {"gamma_bar", gamma_bar},    {"order", approx.order}};
    return doc.dump(2) + "\n";
}

std::string reserialize_approx_json(const std::string& text) {
    return json::parse(text).dump(2) + "\n";
}

std::string sweep_csv(const std::vector<SweepRecord>& records) {
    std::ostringstream out;
    out << "lambda,order,scheme,estimate,std_error,bias,wallclock_s,normalized_s\n";
    for (const auto& r : records) {
        out << fmt_double(r.lambda) << ',' << r.order << ',' << scheme_name(r.scheme)
            << ',' << fmt_double(r.estimate) << ',' << fmt_double(r.std_error) << ','
            << fmt_double(r.bias) << ',' << fmt_double(r.wallclock_seconds) << ','
            << fmt_double(r.seconds_normalized) << '\n';
    }
    return out.str();
}

std::string rates_csv(const RateCurve& curve) {
    std::ostringstream out;
    out << "lambda,epsilon,J\n";
    for (const auto& p : curve.points) {
        out << fmt_double(p.lambda) << ',' << fmt_double(p.epsilon) << ','
            << fmt_double(p.j) << '\n';
    }
    return out.str();
}

namespace {

void write_artifact(const std::string& text, const std::string& out_path,
                    const std::string& summary, std::ostream& out) {
    if (out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file) throw ConfigError("cannot write output file \"" + out_path + "\"", "out");
    file << text;
    out << summary << " -> " << out_path << "\n";
}

std::vector<double> parse_lambda_grid(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) {
        throw ConfigError("--lambda-grid expects a:b:points", "lambda-grid");
    }
    const double a = parse_double(parts[0], "lambda-grid");
    const double b = parse_double(parts[1], "lambda-grid");
    const long n = parse_long(parts[2], "lambda-grid");
    if (!(a > 0.0) || !(b > a) || n < 2) {
        throw ConfigError("--lambda-grid needs 0 < a < b and points >= 2", "lambda-grid");
    }
    std::vector<double> grid(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) {
        grid[static_cast<size_t>(i)] =
            a * std::pow(b / a, static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return grid;
}

void emit_error(std::ostream& err, const std::string& kind, const std::string& message,
                const std::string& field = "") {
    json record{{"error", json{{"kind", kind}, {"message", message}}}};
    if (!field.empty()) record["error"]["field"] = field;
    err << record.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal compound-Poisson approximation and jump-adapted weak "
                 "simulation of Levy-driven SDEs"};
    app.require_subcommand(1);

    std::string config_path, out_path, scheme_name_arg = "wt1", lambda_grid_arg;
    int order = 2, substeps = -1, workers = 0;
    double lambda = 1.0;
    long paths = -1;
    long seed = -1;
    bool match_third = false, trace = false;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--out", out_path, "output artifact path");
        sub->add_option("--workers", workers, "worker threads (0 = machine parallelism)");
    };

    CLI::App* approx_cmd =
        app.add_subcommand("approx", "build one finite-activity approximation");
    add_common(approx_cmd);
    approx_cmd->add_option("--order", order, "moment order n in {2,3,4}")->required();
    approx_cmd->add_option("--lambda", lambda, "target intensity")->required();
    approx_cmd->add_flag("--match-third", match_third, "order-3 third-moment split");

    CLI::App* rates_cmd = app.add_subcommand("rates", "error functional over a lambda grid");
    add_common(rates_cmd);
    rates_cmd->add_option("--order", order, "moment order n in {2,3,4}")->required();
    rates_cmd->add_option("--lambda-grid", lambda_grid_arg, "a:b:points (geometric)")
        ->required();

    CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimate of E[f(X_1)]");
    add_common(sim_cmd);
    sim_cmd->add_option("--order", order, "moment order n in {2,3,4}")->required();
    sim_cmd->add_option("--lambda", lambda, "target intensity")->required();
    sim_cmd->add_option("--scheme", scheme_name_arg, "wt1 | wt2 | nv");
    sim_cmd->add_option("--paths", paths, "Monte Carlo paths");
    sim_cmd->add_option("--seed", seed, "RNG seed");
    sim_cmd->add_option("--substeps", substeps, "scheme substeps per inter-jump leg");
    sim_cmd->add_flag("--trace", trace, "write a t,x trace CSV of path 0");

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "convergence sweep over the config run block");
    add_common(sweep_cmd);

    std::vector<std::string> argv_store;
    argv_store.push_back("levysim");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    argv.reserve(argv_store.size());
    for (auto& s : argv_store) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        emit_error(err, "usage", e.what());
        return 2;
    }

    try {
        ExperimentConfig cfg = load_config(config_path);
        if (!out_path.empty()) cfg.out = out_path;
        if (paths >= 0) {
            if (paths < 2) throw ConfigError("paths must be >= 2", "paths");
            cfg.run.paths = paths;
        }
        if (seed >= 0) cfg.run.seed = static_cast<uint64_t>(seed);
        if (substeps >= 0) {
            if (substeps < 1) throw ConfigError("substeps must be >= 1", "substeps");
            cfg.run.substeps = substeps;
        }

        const LevyMeasureSpec measure = make_measure(cfg.measure);
        if (*approx_cmd) {
            const FiniteApprox approx = build_approx(measure, order, lambda, match_third);
            const LevyModel model = make_model(cfg);
            const double gamma_bar = effective_drift(model, approx).gamma_bar;
            std::ostringstream summary;
            summary << "approx order=" << order << " lambda=" << lambda
                    << " cutoff=" << approx.cutoff << " atoms=" << approx.atoms.size();
            write_artifact(approx_json(approx, gamma_bar), cfg.out, summary.str(), out);
        } else if (*rates_cmd) {
            const RateCurve curve =
                rate_curve(measure, order, parse_lambda_grid(lambda_grid_arg));
            std::ostringstream summary;
            summary << "rates order=" << order << " points=" << curve.points.size()
                    << " slope=" << curve.slope;
            write_artifact(rates_csv(curve), cfg.out, summary.str(), out);
        } else if (*sim_cmd) {
            const SchemeKind scheme = parse_scheme(scheme_name_arg);
            const FiniteApprox approx =
                build_approx(measure, order, lambda, cfg.run.match_third_moment);
            const LevyModel model = make_model(cfg);
            const StepperConfig stepper{cfg.run.substeps};
            std::optional<double> reference = cfg.run.reference;
            if (!reference) reference = closed_form_reference(cfg);
            const MCResult result =
                estimate(model, approx, scheme, stepper, make_payoff(cfg.run),
                         cfg.run.paths, cfg.run.seed, workers, reference);
            json doc{{"estimate", result.estimate},
                     {"std_error", result.std_error},
                     {"paths", result.paths},
                     {"seed", result.seed},
                     {"wallclock_seconds", result.wallclock_seconds}};
            if (result.bias) doc["bias"] = *result.bias;
            out << doc.dump(2) << "\n";
            if (trace) {
                if (cfg.out.empty()) {
                    throw ConfigError("--trace needs an output path (--out)", "out");
                }
                RngStream stream = stream_for(cfg.run.seed, 0);
                const PathOutcome path =
                    simulate_path(model, approx, scheme, stepper, stream, true);
                std::ostringstream csv;
                csv << "t,x\n";
                for (const auto& [t, x] : path.trace) {
                    csv << fmt_double(t) << ',' << fmt_double(x) << '\n';
                }
                write_artifact(csv.str(), cfg.out, "trace", out);
            }
        } else if (*sweep_cmd) {
            std::optional<double> reference = cfg.run.reference;
            if (!reference) reference = closed_form_reference(cfg);
            if (!reference) {
                throw ConfigError(
                    "sweep needs run.reference (no closed form for this payoff/model)",
                    "reference");
            }
            const LevyModel model = make_model(cfg);
            const StepperConfig stepper{cfg.run.substeps};
            const auto records = convergence_sweep(
                model, cfg.run.orders, cfg.run.schemes, cfg.run.lambdas,
                make_payoff(cfg.run), cfg.run.paths, cfg.run.seed, *reference, stepper,
                workers, cfg.run.match_third_moment);
            std::ostringstream summary;
            summary << "sweep cells=" << records.size() << " paths=" << cfg.run.paths;
            write_artifact(sweep_csv(records), cfg.out, summary.str(), out);
        }
        return 0;
    } catch (const ConfigError& e) {
        emit_error(err, e.kind(), e.what(), e.field);
        return 1;
    } catch (const Error& e) {
        emit_error(err, e.kind(), e.what());
        return 1;
    } catch (const std::exception& e) {
        emit_error(err, "internal", e.what());
        return 1;
    }
}

}  // namespace levysim::cli
