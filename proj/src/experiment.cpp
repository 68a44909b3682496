#include "needleseek/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "needleseek/accel.hpp"
#include "needleseek/needleapprox.hpp"
#include "needleseek/quadratic.hpp"
#include "needleseek/signals.hpp"

namespace needleseek {

namespace {

constexpr double kSampleWarning = 1e7;

struct KeySpec {
    const char* name;
    const char* fallback;
    const char* help;
};

struct ExperimentSpec {
    const char* name;
    const char* summary;
    std::vector<KeySpec> keys;
};

const std::vector<ExperimentSpec>& registry() {
    static const std::vector<ExperimentSpec> specs = {
        {"two_needle_demo",
         "simulated x(jT) vs first-order iteration vs gradient flow",
         {{"objective", "quadratic", "quadratic | abs_cubed"},
          {"b", "2", "quadratic coefficient b"},
          {"c", "3", "quadratic coefficient c"},
          {"T", "1.3", "period"},
          {"epsilon", "1e-5", "needle width, 0 < epsilon < T/2"},
          {"alpha", "-10", "needle amplitude"},
          {"x0", "-1", "initial state"},
          {"periods", "10", "number of periods"},
          {"method", "rk4", "rk4 | euler"},
          {"h", "auto", "solver step; auto picks eps/m aligned with T/2"},
          {"output", "two_needle_demo.csv", "output file name"}}},
        {"order_check_thm1",
         "error of the two-needle estimate under epsilon halving",
         {{"objective", "quadratic", "quadratic | abs_cubed"},
          {"b", "2", "quadratic coefficient b"},
          {"c", "3", "quadratic coefficient c"},
          {"T", "1.3", "period"},
          {"alpha", "-10", "needle amplitude"},
          {"x0", "-1", "initial state"},
          {"epsilons", "1e-3,5e-4,2.5e-4", "comma-separated needle widths"},
          {"oracle_steps", "50", "simulation steps per needle width for the reference"},
          {"output", "order_check_thm1.csv", "output file name"}}},
        {"order_check_lemma1",
         "error of the T = 8 eps estimate under epsilon halving",
         {{"objective", "quadratic", "quadratic | abs_cubed"},
          {"b", "2", "quadratic coefficient b"},
          {"c", "3", "quadratic coefficient c"},
          {"alpha", "1", "needle amplitude"},
          {"x0", "0", "initial state"},
          {"epsilons", "2e-2,1e-2,5e-3", "comma-separated needle widths"},
          {"steps", "100", "solver steps per needle width"},
          {"output", "order_check_lemma1.csv", "output file name"}}},
        {"many_needles",
         "finite-N needle sum vs its limit vs simulation with the discretized dither",
         {{"objective", "quadratic", "quadratic | abs_cubed"},
          {"b", "2", "quadratic coefficient b"},
          {"c", "3", "quadratic coefficient c"},
          {"T", "1", "period"},
          {"x0", "-1", "initial state"},
          {"dither", "trig", "trig | smooth_root"},
          {"root_n", "1", "N of the smooth_root pair"},
          {"needles", "16,32,64,128", "comma-separated needle counts"},
          {"steps_per_needle", "200", "solver steps per needle"},
          {"output", "many_needles.csv", "output file name"}}},
        {"fixed_points_report",
         "fixed points of the quadratic period map with residuals and stability",
         {{"b", "2", "quadratic coefficient b"},
          {"c", "3", "quadratic coefficient c, needs 4c - b^2 > 0"},
          {"T", "1.3", "period"},
          {"epsilon", "1e-5", "needle width, 0 < epsilon < T/2"},
          {"alpha", "-10", "needle amplitude (stability only)"},
          {"output", "fixed_points_report.csv", "output file name"}}},
        {"algorithm_comparison",
         "heavy ball vs Nesterov vs hybrid dynamics",
         {{"objective", "abs_cubed", "quadratic | abs_cubed"},
          {"b", "2", "quadratic coefficient b"},
          {"c", "3", "quadratic coefficient c"},
          {"k", "2", "damping"},
          {"c1", "1", "gradient gain at z1"},
          {"c2", "1", "gradient gain at z1 + gamma z2"},
          {"gamma", "1", "look-ahead factor"},
          {"z0", "1", "initial position (velocity starts at 0)"},
          {"horizon", "20", "integration horizon"},
          {"h", "1e-3", "solver step"},
          {"method", "euler", "rk4 | euler"},
          {"stride", "1", "write every stride-th step"},
          {"output", "algorithm_comparison.csv", "output file name"}}},
    };
    return specs;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Typed access to one experiment's keys, defaults from the registry.
class Reader {
public:
    Reader(const ConfigMap& cfg, const ExperimentSpec& spec) : cfg_(cfg), spec_(spec) {
        std::set<std::string> known{"experiment"};
        for (const auto& k : spec.keys) known.insert(k.name);
        for (const auto& [key, value] : cfg) {
            if (!known.count(key)) {
                throw ConfigError("unknown key '" + key + "' for experiment " + spec.name);
            }
        }
    }

    [[nodiscard]] std::string text(const std::string& key) const {
        if (auto it = cfg_.find(key); it != cfg_.end()) return it->second;
        for (const auto& k : spec_.keys) {
            if (key == k.name) return k.fallback;
        }
        throw std::logic_error("key not registered: " + key);
    }

    [[nodiscard]] double number(const std::string& key) const { return parse_number(key, text(key)); }

    [[nodiscard]] long integer(const std::string& key, long min_value) const {
        const std::string s = text(key);
        std::size_t used = 0;
        long v = 0;
        try {
            v = std::stol(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) throw ConfigError(key + ": expected an integer, got '" + s + "'");
        if (v < min_value) throw ConfigError(key + " must be >= " + std::to_string(min_value) + " (got " + s + ")");
        return v;
    }

    [[nodiscard]] std::vector<double> numbers(const std::string& key) const {
        std::vector<double> out;
        std::stringstream ss(text(key));
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(parse_number(key, trim(item)));
        if (out.empty()) throw ConfigError(key + ": expected a comma-separated list of numbers");
        return out;
    }

    [[nodiscard]] std::string choice(const std::string& key, std::initializer_list<const char*> allowed) const {
        const std::string v = text(key);
        for (const char* a : allowed) {
            if (v == a) return v;
        }
        std::string msg = key + " must be one of";
        for (const char* a : allowed) msg += std::string(" ") + a;
        throw ConfigError(msg + " (got '" + v + "')");
    }

private:
    static double parse_number(const std::string& key, const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size() || !std::isfinite(v)) {
            throw ConfigError(key + ": expected a finite number, got '" + s + "'");
        }
        return v;
    }

    const ConfigMap& cfg_;
    const ExperimentSpec& spec_;
};

// Runs `check` and reports library precondition failures as config errors.
template <class Fn>
void validated(Fn&& check) {
    try {
        check();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
    }
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

Objective read_objective(const Reader& r) {
    const std::string kind = r.choice("objective", {"quadratic", "abs_cubed"});
    if (kind == "abs_cubed") return abs_cubed_objective();
    return quadratic_objective(r.number("b"), r.number("c"));
}

Method read_method(const Reader& r) {
    return r.choice("method", {"rk4", "euler"}) == "euler" ? Method::euler : Method::rk4;
}

void warn_samples(std::ostream& log, double samples, const std::string& what) {
    if (samples > kSampleWarning) {
        log << "warning: " << what << " stores " << format_number(std::round(samples))
            << " samples; memory use may be large\n";
    }
}

// Evaluates fn(0..n-1) on up to `threads` threads; results keep their index
// so the output does not depend on scheduling.
template <class T>
std::vector<T> sweep(std::size_t n, int threads, const std::function<T(std::size_t)>& fn) {
    std::vector<T> out(n);
    std::vector<std::exception_ptr> errors(n);
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
    auto work = [&](std::size_t w) {
        for (std::size_t i = w; i < n; i += workers) {
            try {
                out[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

template <class Fn>
auto numeric(Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const NumericError&) {
        throw;
    } catch (const std::exception& e) {
        throw NumericError(e.what());
    }
}

std::string ratio_column(const std::vector<double>& errors, std::size_t i) {
    if (i == 0) return "";
    return format_number(errors[i - 1] / errors[i]);
}

CsvTable two_needle_demo(const Reader& r, std::ostream& log) {
    const Objective f = read_objective(r);
    const NeedleSpec spec{r.number("T"), r.number("epsilon"), r.number("alpha")};
    const double x0 = r.number("x0");
    const long periods = r.integer("periods", 1);
    SolverConfig cfg;
    validated([&] {
        spec.validate();
        cfg = default_config(spec);
        cfg.method = read_method(r);
        if (r.text("h") != "auto") cfg.step = r.number("h");
        cfg.validate();
        check_alignment(two_needle_u2(spec), cfg.step);
    });
    warn_samples(log, spec.period / cfg.step, "each simulated period");

    const Signal u1 = two_needle_u1(spec);
    const Signal u2 = two_needle_u2(spec);
    const auto n = static_cast<std::size_t>(periods);

    std::vector<double> sim{x0};
    numeric([&] {
        double x = x0;
        for (std::size_t j = 0; j < n; ++j) {
            const Trajectory traj = integrate_affine(f, u1, u2, x, spec.period, cfg);
            if (traj.terminated_early()) {
                throw NumericError("simulation escapes in period " + std::to_string(j) + ": " +
                                   traj.termination_reason());
            }
            x = traj.back()[0];
            sim.push_back(x);
        }
        return 0;
    });

    std::vector<double> approx{x0};
    const QuadraticCase q = quadratic_case(r.number("b"), r.number("c"));
    if (r.text("objective") == "quadratic" && q.discriminant_positive) {
        const auto run = iterate_closed_form(q, spec.period, spec.epsilon, spec.alpha, x0, periods);
        if (run.aborted) throw NumericError("closed-form iteration failed at " + run.error);
        approx.insert(approx.end(), run.values.begin(), run.values.end());
    } else {
        const auto run = numeric([&] { return two_needle_iterate(f, spec, x0, static_cast<int>(periods), cfg); });
        if (run.aborted) throw NumericError("first-order iteration failed at " + run.error);
        for (const auto& s : run.steps) approx.push_back(s.value);
    }

    // The gradient flow is smooth, so a coarse step of T/1000 is plenty.
    SolverConfig flow_cfg{Method::rk4, spec.period / 1000.0, cfg.max_state};
    const Trajectory flow = numeric([&] { return gradient_flow_baseline(f, x0, periods * spec.period, flow_cfg); });
    if (flow.terminated_early()) throw NumericError("gradient flow diverges: " + flow.termination_reason());

    std::string csv = "period,x_sim,x_approx,x_gradflow\n";
    for (std::size_t j = 0; j <= n; ++j) {
        csv += std::to_string(j) + ',' + format_number(sim[j]) + ',' + format_number(approx[j]) + ',' +
               format_number(flow[j * 1000]) + '\n';
    }
    return {r.text("output"), csv};
}

CsvTable order_check_thm1(const Reader& r, std::ostream& log, int threads) {
    const Objective f = read_objective(r);
    const double period = r.number("T");
    const double alpha = r.number("alpha");
    const double x0 = r.number("x0");
    const std::vector<double> eps = r.numbers("epsilons");
    const long oracle_steps = r.integer("oracle_steps", 1);
    std::vector<NeedleSpec> specs;
    std::vector<SolverConfig> oracle, estimate;
    validated([&] {
        for (double e : eps) {
            const NeedleSpec spec{period, e, alpha};
            spec.validate();
            const SolverConfig oc{Method::rk4, e / static_cast<double>(oracle_steps), 1e6};
            check_alignment(two_needle_u2(spec), oc.step);
            specs.push_back(spec);
            oracle.push_back(oc);
            estimate.push_back(default_config(spec));
        }
    });
    for (const auto& oc : oracle) warn_samples(log, period / oc.step, "a reference simulation");

    const auto errors = sweep<double>(specs.size(), threads, [&](std::size_t i) {
        return numeric([&] {
            const NeedleSpec& s = specs[i];
            const Trajectory sim = integrate_affine(f, two_needle_u1(s), two_needle_u2(s), x0, period, oracle[i]);
            if (sim.terminated_early()) throw NumericError("reference simulation escapes: " + sim.termination_reason());
            const ApproxResult est = two_needle_estimate(f, s, x0, estimate[i]);
            return std::abs(est.value - sim.back()[0]);
        });
    });

    std::string csv = "epsilon,abs_error,ratio_to_prev\n";
    for (std::size_t i = 0; i < errors.size(); ++i) {
        csv += format_number(eps[i]) + ',' + format_number(errors[i]) + ',' + ratio_column(errors, i) + '\n';
    }
    return {r.text("output"), csv};
}

CsvTable order_check_lemma1(const Reader& r, std::ostream& log, int threads) {
    const Objective f = read_objective(r);
    const double alpha = r.number("alpha");
    const double x0 = r.number("x0");
    const std::vector<double> eps = r.numbers("epsilons");
    const long steps = r.integer("steps", 1);
    validated([&] {
        for (double e : eps) NeedleSpec{8.0 * e, e, alpha}.validate();
    });
    warn_samples(log, 8.0 * static_cast<double>(steps), "a reference simulation");

    const auto errors = sweep<double>(eps.size(), threads, [&](std::size_t i) {
        return numeric([&] {
            const NeedleSpec s{8.0 * eps[i], eps[i], alpha};
            const SolverConfig cfg{Method::rk4, eps[i] / static_cast<double>(steps), 1e6};
            const Trajectory sim = integrate_affine(f, two_needle_u1(s), two_needle_u2(s), x0, s.period, cfg);
            if (sim.terminated_early()) throw NumericError("reference simulation escapes: " + sim.termination_reason());
            const ApproxResult est = lie_bracket_estimate(f, eps[i], alpha, x0, cfg);
            return std::abs(est.value - sim.back()[0]);
        });
    });

    std::string csv = "epsilon,abs_error,ratio_to_prev\n";
    for (std::size_t i = 0; i < errors.size(); ++i) {
        csv += format_number(eps[i]) + ',' + format_number(errors[i]) + ',' + ratio_column(errors, i) + '\n';
    }
    return {r.text("output"), csv};
}

CsvTable many_needles(const Reader& r, std::ostream& log, int threads) {
    const Objective f = read_objective(r);
    const double period = r.number("T");
    const double x0 = r.number("x0");
    const std::string dither = r.choice("dither", {"trig", "smooth_root"});
    const long root_n = r.integer("root_n", 1);
    const long steps = r.integer("steps_per_needle", 1);
    std::vector<long> counts;
    for (double v : r.numbers("needles")) {
        require(v >= 1.0 && v == std::floor(v), "needles must be positive integers");
        counts.push_back(static_cast<long>(v));
    }
    require(period > 0.0, "T must be positive");
    const auto pair = dither == "trig" ? trig_pair(period) : smooth_root_pair(period, static_cast<int>(root_n));
    for (long n : counts) warn_samples(log, static_cast<double>(n * steps), "a simulation");

    struct Row {
        double estimate, limit, sim;
    };
    const auto rows = sweep<Row>(counts.size(), threads, [&](std::size_t i) {
        return numeric([&] {
            const int n = static_cast<int>(counts[i]);
            const SolverConfig cfg{Method::rk4, period / static_cast<double>(n * steps), 1e6};
            const ApproxResult est = many_needles_estimate(f, pair.first, pair.second, n, x0, cfg);
            const ApproxResult lim = many_needles_limit(f, pair.first, pair.second, x0, cfg);
            const Trajectory sim =
                integrate_affine(f, pair.first, needle_discretize(pair.second, n), x0, period, cfg);
            if (sim.terminated_early()) throw NumericError("simulation escapes: " + sim.termination_reason());
            return Row{est.value, lim.value, sim.back()[0]};
        });
    });

    std::string csv = "n,estimate,limit,x_sim,abs_error_sim,abs_diff_limit\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& row = rows[i];
        csv += std::to_string(counts[i]) + ',' + format_number(row.estimate) + ',' + format_number(row.limit) +
               ',' + format_number(row.sim) + ',' + format_number(std::abs(row.estimate - row.sim)) + ',' +
               format_number(std::abs(row.estimate - row.limit)) + '\n';
    }
    return {r.text("output"), csv};
}

CsvTable fixed_points_report(const Reader& r) {
    const QuadraticCase q = quadratic_case(r.number("b"), r.number("c"));
    const NeedleSpec spec{r.number("T"), r.number("epsilon"), r.number("alpha")};
    validated([&] { spec.validate(); });
    require(q.discriminant_positive, "fixed_points_report needs 4c - b^2 > 0");

    const FixedPoints fp = numeric([&] { return fixed_points(q, spec.period, spec.epsilon, spec.alpha); });
    std::string csv = "root,residual,stability\n";
    const std::pair<double, Stability> roots[] = {{fp.x_bar_1, fp.stability_1}, {fp.x_bar_2, fp.stability_2}};
    for (const auto& [x, st] : roots) {
        const double res = numeric([&] { return fixed_point_residual(q, spec.period, spec.epsilon, x); });
        csv += format_number(x) + ',' + format_number(res) + ',' + to_string(st) + '\n';
    }
    return {r.text("output"), csv};
}

CsvTable algorithm_comparison(const Reader& r, std::ostream& log) {
    const Objective f = read_objective(r);
    AccelParams hybrid{AccelMethod::hybrid, r.number("k"), r.number("c1"), r.number("c2"), r.number("gamma")};
    const double z0 = r.number("z0");
    const double horizon = r.number("horizon");
    const long stride = r.integer("stride", 1);
    SolverConfig cfg{read_method(r), r.number("h"), 1e6};
    validated([&] {
        hybrid.validate();
        cfg.validate();
        require(horizon > 0.0, "horizon must be positive");
        (void)steps_for(horizon, cfg.step);
    });
    warn_samples(log, 2.0 * horizon / cfg.step, "each run");

    const AccelParams heavy = heavy_ball_equivalent(hybrid);
    const AccelParams nest = nesterov_equivalent(hybrid);
    const State start{z0, 0.0};
    auto run = [&](const AccelParams& p) {
        AccelRun out = numeric([&] { return run_accel(f, p, start, horizon, cfg); });
        if (out.trajectory.terminated_early()) {
            throw NumericError(std::string(to_string(p.method)) + " diverges: " +
                               out.trajectory.termination_reason());
        }
        return out;
    };
    const AccelRun a = run(heavy), b = run(nest), c = run(hybrid);

    std::string csv = "t,heavy,nesterov,hybrid,V_hybrid\n";
    for (std::size_t k = 0; k < c.trajectory.size(); k += static_cast<std::size_t>(stride)) {
        csv += format_number(c.trajectory.time(k)) + ',' + format_number(a.trajectory[k]) + ',' +
               format_number(b.trajectory[k]) + ',' + format_number(c.trajectory[k]) + ',' +
               format_number(c.lyapunov.values[k]) + '\n';
    }
    return {r.text("output"), csv};
}

}  // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ConfigMap parse_config(std::istream& in) {
    ConfigMap cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (!cfg.emplace(key, value).second) {
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
    }
    return cfg;
}

ConfigMap parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

CsvTable run_experiment(const ConfigMap& cfg, std::ostream& log, int threads) {
    const auto it = cfg.find("experiment");
    if (it == cfg.end()) throw ConfigError("missing key 'experiment'");
    const auto& specs = registry();
    const auto spec = std::find_if(specs.begin(), specs.end(),
                                   [&](const ExperimentSpec& s) { return it->second == s.name; });
    if (spec == specs.end()) throw ConfigError("unknown experiment '" + it->second + "'");

    const Reader r(cfg, *spec);
    const std::string name = spec->name;
    if (name == "two_needle_demo") return two_needle_demo(r, log);
    if (name == "order_check_thm1") return order_check_thm1(r, log, threads);
    if (name == "order_check_lemma1") return order_check_lemma1(r, log, threads);
    if (name == "many_needles") return many_needles(r, log, threads);
    if (name == "fixed_points_report") return fixed_points_report(r);
    return algorithm_comparison(r, log);
}

Trajectory gradient_flow_baseline(const Objective& f, double x0, double horizon, const SolverConfig& cfg) {
    if (f.dim() != 1) throw std::invalid_argument("gradient_flow_baseline needs a scalar objective");
    auto rhs = [&f](double, std::span<const double> x, std::span<double> dx) { dx[0] = -f.slope(x[0]); };
    return integrate_ode(rhs, State{x0}, horizon, cfg);
}

std::string list_experiments() {
    std::ostringstream out;
    for (const auto& spec : registry()) {
        out << spec.name << ": " << spec.summary << '\n';
        for (const auto& k : spec.keys) {
            char line[200];
            std::snprintf(line, sizeof line, "  %-18s default %-22s %s\n", k.name, k.fallback, k.help);
            out << line;
        }
    }
    return out.str();
}

int threads_from_env() {
    const char* v = std::getenv("NEEDLESEEK_THREADS");
    if (!v) return 1;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (end == v || *end != '\0' || n < 1) return 1;
    return static_cast<int>(std::min(n, 256L));
}

}  // namespace needleseek
