// Command-line front end. Talks to the library only through supenv.h.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "supenv/supenv.h"

#ifndef SUPENV_DEFAULT_GOLDEN_DIR
#define SUPENV_DEFAULT_GOLDEN_DIR "battery/golden"
#endif

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitConfig = 2;

struct RunConfig {
    std::string fn;
    std::vector<double> box;
    std::vector<int> nodes;
    int refine_depth = 3;
    int approach_depth = 0;
    double far_field = 0.0;  // 0: entry default (battery) or 1
    std::vector<double> p;
    double a = 0.0, b = 0.0;
    int intervals = 64;
    int slopes = 401;
    std::vector<double> slope_range{-2.0, 2.0};
    std::uint64_t seed = 1;
    int trials = 1000;
    double xi = 0.0;
    std::vector<double> c;
    int n = 1;
    std::vector<double> probes;
    std::string out;
    std::string format;
    int threads = 0;
    std::string golden_dir = SUPENV_DEFAULT_GOLDEN_DIR;
    bool update = false;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Owns a C handle.
using FunctionPtr = std::unique_ptr<supenv_function, decltype(&supenv_function_free)>;
using ReportPtr = std::unique_ptr<supenv_report, decltype(&supenv_report_free)>;

void check(supenv_status status, const char* what) {
    if (status != SUPENV_OK)
        throw ConfigError(std::string(what) + ": " + supenv_status_name(status) + ": " + supenv_last_error());
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("fn: cannot open expression file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct Loaded {
    FunctionPtr fn{nullptr, supenv_function_free};
    supenv_box box{};
    supenv_envelope_options options{};
};

// battery:NAME, expr:TEXT or a path to an expression file.
Loaded load_function(const RunConfig& cfg) {
    if (cfg.fn.empty()) throw ConfigError("fn: required (battery:NAME, expr:TEXT or an expression file)");
    Loaded l;
    supenv_envelope_options_default(&l.options);
    supenv_function* raw = nullptr;
    bool have_box = false;
    if (cfg.fn.rfind("battery:", 0) == 0) {
        check(supenv_function_battery(cfg.fn.c_str() + 8, &raw, &l.box, &l.options), "fn");
        have_box = true;
    } else if (cfg.fn.rfind("expr:", 0) == 0) {
        check(supenv_function_parse(cfg.fn.c_str() + 5, "expr", &raw), "fn");
    } else {
        const std::string name = std::filesystem::path(cfg.fn).stem().string();
        check(supenv_function_parse(slurp(cfg.fn).c_str(), name.c_str(), &raw), "fn");
    }
    l.fn.reset(raw);

    const int dim = supenv_function_dim(raw);
    if (!have_box) {
        l.box.dim = dim;
        for (int a = 0; a < 2; ++a) {
            l.box.lo[a] = -2.0;
            l.box.hi[a] = 2.0;
            l.box.nodes[a] = dim == 1 ? 801 : 41;
        }
    }
    if (!cfg.box.empty()) {
        if (cfg.box.size() == 2) {
            for (int a = 0; a < 2; ++a) {
                l.box.lo[a] = cfg.box[0];
                l.box.hi[a] = cfg.box[1];
            }
        } else if (cfg.box.size() == 4 && dim == 2) {
            l.box.lo[0] = cfg.box[0];
            l.box.hi[0] = cfg.box[1];
            l.box.lo[1] = cfg.box[2];
            l.box.hi[1] = cfg.box[3];
        } else {
            throw ConfigError("box: expected 'lo hi' or, in 2D, 'xlo xhi ylo yhi'");
        }
    }
    if (!cfg.nodes.empty()) {
        if (cfg.nodes.size() > 2) throw ConfigError("nodes: expected one or two counts");
        l.box.nodes[0] = cfg.nodes[0];
        l.box.nodes[1] = cfg.nodes.size() == 2 ? cfg.nodes[1] : cfg.nodes[0];
    }
    l.options.refine_depth = cfg.refine_depth;
    l.options.approach_depth = cfg.approach_depth;
    if (cfg.far_field != 0.0) l.options.far_field = cfg.far_field;
    return l;
}

int finish(const ReportPtr& report, const RunConfig& cfg, const char* default_format) {
    std::string format = cfg.format;
    if (format.empty() && !cfg.out.empty()) {
        const auto ext = std::filesystem::path(cfg.out).extension().string();
        if (ext == ".csv") format = "csv";
        if (ext == ".json") format = "json";
    }
    if (format.empty()) format = default_format;

    if (cfg.out.empty()) {
        std::cerr << supenv_report_summary(report.get());
        std::cout << (format == "csv" ? supenv_report_csv(report.get()) : supenv_report_json(report.get()));
    } else {
        check(supenv_report_write(report.get(), cfg.out.c_str(), format.c_str()), "out");
        std::cout << supenv_report_summary(report.get());
    }
    return supenv_report_passed(report.get()) ? kExitOk : kExitAssertion;
}

ReportPtr adopt(supenv_report* r) { return ReportPtr(r, supenv_report_free); }

int run(const std::string& command, const RunConfig& cfg) {
    if (cfg.threads < 0) throw ConfigError("threads: must be >= 0");
    if (cfg.threads > 0) check(supenv_set_threads(cfg.threads), "threads");
    supenv_report* raw = nullptr;

    if (command == "recover") {
        if (cfg.c.size() != 2) throw ConfigError("c: expected two numbers 'lo hi'");
        check(supenv_run_recover(cfg.c[0], cfg.c[1], cfg.xi, cfg.n, &raw), "recover");
        return finish(adopt(raw), cfg, "json");
    }
    if (command == "battery") {
        check(supenv_run_battery(cfg.golden_dir.c_str(), cfg.update ? 1 : 0, &raw), "battery");
        auto report = adopt(raw);
        std::cout << supenv_report_summary(report.get());
        if (!cfg.out.empty()) {
            const std::string format = cfg.format.empty() ? "json" : cfg.format;
            check(supenv_report_write(report.get(), cfg.out.c_str(), format.c_str()), "out");
        }
        return supenv_report_passed(report.get()) ? kExitOk : kExitAssertion;
    }

    Loaded l = load_function(cfg);
    if (command == "envelope") {
        check(supenv_run_envelope(l.fn.get(), &l.box, &l.options, &raw), "envelope");
        return finish(adopt(raw), cfg, "csv");
    }
    if (command == "sweep-p") {
        check(supenv_run_sweep_p(l.fn.get(), &l.box, &l.options, cfg.p.data(), cfg.p.size(), &raw), "sweep-p");
        return finish(adopt(raw), cfg, "csv");
    }
    if (command == "gamma-min") {
        if (cfg.slope_range.size() != 2) throw ConfigError("slope-range: expected two numbers 'lo hi'");
        check(supenv_run_gamma_min(l.fn.get(), cfg.a, cfg.b, cfg.intervals, cfg.slope_range[0], cfg.slope_range[1],
                                   cfg.slopes, cfg.p.data(), cfg.p.size(), &raw),
              "gamma-min");
        return finish(adopt(raw), cfg, "json");
    }
    if (command == "check-h") {
        if (cfg.probes.empty()) throw ConfigError("probes: at least one level is required");
        check(supenv_run_check_h(l.fn.get(), &l.box, cfg.probes.data(), cfg.probes.size(), &raw), "check-h");
        return finish(adopt(raw), cfg, "json");
    }
    if (command == "falsify") {
        check(supenv_run_falsify(l.fn.get(), cfg.xi, cfg.seed, cfg.trials, &raw), "falsify");
        return finish(adopt(raw), cfg, "json");
    }
    throw ConfigError("unknown command '" + command + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Envelope calculus for extended-real functions on boxes"};
    app.set_version_flag("--version", supenv_version());
    app.require_subcommand(1);
    app.config_formatter(std::make_shared<CLI::ConfigINI>());
    app.set_config("--config", "", "key=value file; command-line flags take precedence");
    app.allow_config_extras(CLI::config_extras_mode::error);

    RunConfig cfg;
    auto take_last = CLI::MultiOptionPolicy::TakeLast;
    app.add_option("--fn", cfg.fn, "battery:NAME, expr:TEXT or an expression file")->multi_option_policy(take_last);
    app.add_option("--box", cfg.box, "lo hi, or xlo xhi ylo yhi")->expected(2, 4);
    app.add_option("--nodes", cfg.nodes, "nodes per axis (one or two counts)")->expected(1, 2);
    app.add_option("--refine-depth", cfg.refine_depth, "dyadic depth of the lsc stencil")->multi_option_policy(take_last);
    app.add_option("--approach-depth", cfg.approach_depth, "deepest approach ray, 0 = automatic")
        ->multi_option_policy(take_last);
    app.add_option("--far-field", cfg.far_field, "far lattice scale for sublevel hulls (>= 1)")
        ->multi_option_policy(take_last);
    app.add_option("--p", cfg.p, "p ladder, comma separated")->delimiter(',');
    app.add_option("--a", cfg.a, "boundary value u(0)")->multi_option_policy(take_last);
    app.add_option("--b", cfg.b, "boundary value u(1)")->multi_option_policy(take_last);
    app.add_option("--intervals", cfg.intervals, "mesh cells N")->multi_option_policy(take_last);
    app.add_option("--slopes", cfg.slopes, "slope grid size")->multi_option_policy(take_last);
    app.add_option("--slope-range", cfg.slope_range, "slope grid lo hi")->expected(2);
    app.add_option("--seed", cfg.seed, "falsifier seed")->multi_option_policy(take_last);
    app.add_option("--trials", cfg.trials, "falsifier trials")->multi_option_policy(take_last);
    app.add_option("--xi", cfg.xi, "gradient xi")->multi_option_policy(take_last);
    app.add_option("--c", cfg.c, "open interval C as lo hi")->expected(2);
    app.add_option("--n", cfg.n, "recovery index")->multi_option_policy(take_last);
    app.add_option("--probes", cfg.probes, "levels for check-h, comma separated")->delimiter(',');
    app.add_option("--out", cfg.out, "output file (stdout if omitted)")->multi_option_policy(take_last);
    app.add_option("--format", cfg.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->multi_option_policy(take_last);
    app.add_option("--threads", cfg.threads, "worker threads (default: SUPENV_THREADS or all cores)")
        ->multi_option_policy(take_last);
    app.add_option("--golden-dir", cfg.golden_dir, "battery golden directory")->multi_option_policy(take_last);
    app.add_flag("--update", cfg.update, "rewrite golden files instead of comparing");

    const char* commands[][2] = {
        {"envelope", "f, f_ls, f_lc, f_lslc on a grid"},
        {"sweep-p", "Lp ladder ((f^p)**)^(1/p) against f_lslc"},
        {"gamma-min", "discrete Lp minima of a boundary value problem"},
        {"recover", "recovery sequence with slopes inside C"},
        {"check-h", "convexity and interior of sublevel sets"},
        {"falsify", "random search for weak Morrey quasiconvexity violations"},
        {"battery", "golden runs and property suite for the built-in battery"},
    };
    for (const auto& c : commands) app.add_subcommand(c[0], c[1])->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::string what = e.what();
        const std::string prefix = "INI was not able to parse ";
        if (what.rfind(prefix, 0) == 0) {
            std::cerr << "config: unknown key '" << what.substr(prefix.size()) << "'\n";
            return kExitConfig;
        }
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        return run(app.get_subcommands().front()->get_name(), cfg);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}
