#include "supenv/supenv.h"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <string>

#include <json.hpp>

#include "battery/battery.hpp"
#include "core/parallel.hpp"
#include "dsl/expr.hpp"
#include "io/export.hpp"
#include "lp/lp_calculus.hpp"
#include "variational/variational.hpp"

using namespace supenv;

struct supenv_function {
    FunctionSpec spec;
    std::string expression;
};

struct supenv_report {
    bool passed = false;
    std::string json, csv, summary;
};

namespace {

thread_local std::string g_last_error;

supenv_status fail(supenv_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

// Runs body, mapping exceptions to status codes and the thread's last error.
template <class Body>
supenv_status guarded(Body&& body) {
    try {
        g_last_error.clear();
        body();
        return SUPENV_OK;
    } catch (const dsl::ParseError& e) {
        return fail(SUPENV_PARSE_ERROR, e.what());
    } catch (const dsl::EvalError& e) {
        return fail(SUPENV_EVAL_ERROR, e.what());
    } catch (const DomainError& e) {
        return fail(SUPENV_DOMAIN_ERROR, e.what());
    } catch (const io::IoError& e) {
        return fail(SUPENV_IO_ERROR, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(SUPENV_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(SUPENV_INTERNAL_ERROR, e.what());
    } catch (...) {
        return fail(SUPENV_INTERNAL_ERROR, "unknown exception");
    }
}

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

BoxGrid to_grid(const supenv_box* box) {
    require(box != nullptr, "box is NULL");
    if (box->dim == 1) return BoxGrid(box->lo[0], box->hi[0], box->nodes[0]);
    if (box->dim == 2) return BoxGrid({box->lo[0], box->lo[1]}, {box->hi[0], box->hi[1]}, {box->nodes[0], box->nodes[1]});
    throw std::invalid_argument("box dim must be 1 or 2, got " + std::to_string(box->dim));
}

envelopes::EnvelopeOptions to_options(const supenv_envelope_options* o) {
    envelopes::EnvelopeOptions out;
    if (o) {
        out.refine_depth = o->refine_depth;
        out.approach_depth = o->approach_depth;
        out.far_field = o->far_field;
    }
    return out;
}

void check_dims(const supenv_function* fn, const BoxGrid& grid) {
    require(fn != nullptr, "function is NULL");
    if (fn->spec.dim() != grid.dim())
        throw std::invalid_argument("function '" + fn->spec.name() + "' is " + std::to_string(fn->spec.dim()) +
                                    "-dimensional but the box is " + std::to_string(grid.dim()) + "-dimensional");
}

io::Source source_of(const supenv_function* fn) { return {fn->spec.name(), fn->expression}; }

std::vector<double> ladder(const double* p, size_t count) {
    if (count == 0) return lp::kDefaultLadder;
    require(p != nullptr, "p ladder is NULL");
    return std::vector<double>(p, p + count);
}

const char* ok(bool b) { return b ? "ok" : "FAILED"; }

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

void emit(supenv_report** out, supenv_report* r) {
    require(out != nullptr, "output pointer is NULL");
    *out = r;
}

}  // namespace

extern "C" {

const char* supenv_last_error(void) { return g_last_error.c_str(); }

const char* supenv_version(void) { return "0.1.0"; }

const char* supenv_status_name(supenv_status status) {
    switch (status) {
        case SUPENV_OK: return "ok";
        case SUPENV_INVALID_ARGUMENT: return "invalid argument";
        case SUPENV_PARSE_ERROR: return "parse error";
        case SUPENV_EVAL_ERROR: return "evaluation error";
        case SUPENV_DOMAIN_ERROR: return "domain error";
        case SUPENV_IO_ERROR: return "i/o error";
        case SUPENV_INTERNAL_ERROR: return "internal error";
    }
    return "unknown status";
}

supenv_status supenv_set_threads(int threads) {
    return guarded([&] {
        require(threads >= 0, "thread count must be >= 0");
        set_thread_count(threads);
    });
}

void supenv_envelope_options_default(supenv_envelope_options* options) {
    if (!options) return;
    const envelopes::EnvelopeOptions d;
    options->refine_depth = d.refine_depth;
    options->approach_depth = d.approach_depth;
    options->far_field = d.far_field;
}

supenv_status supenv_function_parse(const char* source, const char* name, supenv_function** out) {
    return guarded([&] {
        require(source != nullptr && out != nullptr, "source and out must not be NULL");
        *out = nullptr;
        const dsl::Expr e = dsl::parse(source);
        *out = new supenv_function{dsl::to_function_spec(e, name ? name : "expr"), dsl::print(e)};
    });
}

supenv_status supenv_function_battery(const char* name, supenv_function** out, supenv_box* box,
                                      supenv_envelope_options* options) {
    return guarded([&] {
        require(name != nullptr && out != nullptr, "name and out must not be NULL");
        *out = nullptr;
        const auto& entry = battery::find(name);
        if (box) {
            box->dim = entry.dim;
            for (int a = 0; a < 2; ++a) {
                box->lo[a] = entry.lo[static_cast<std::size_t>(a)];
                box->hi[a] = entry.hi[static_cast<std::size_t>(a)];
                box->nodes[a] = entry.nodes[static_cast<std::size_t>(a)];
            }
        }
        if (options) {
            supenv_envelope_options_default(options);
            options->far_field = entry.far_field;
        }
        *out = new supenv_function{entry.function(), dsl::print(dsl::parse(entry.expression))};
    });
}

void supenv_function_free(supenv_function* fn) { delete fn; }

int supenv_function_dim(const supenv_function* fn) { return fn ? fn->spec.dim() : 0; }

const char* supenv_function_expression(const supenv_function* fn) { return fn ? fn->expression.c_str() : ""; }

supenv_status supenv_function_eval(const supenv_function* fn, const double* point, double* value) {
    return guarded([&] {
        require(fn != nullptr && point != nullptr && value != nullptr, "arguments must not be NULL");
        Point p;
        for (int a = 0; a < fn->spec.dim(); ++a) p[static_cast<std::size_t>(a)] = point[a];
        *value = fn->spec(p).to_double();
    });
}

size_t supenv_battery_size(void) { return battery::entries().size(); }

const char* supenv_battery_name(size_t index) {
    const auto& all = battery::entries();
    return index < all.size() ? all[index].name.c_str() : nullptr;
}

supenv_status supenv_run_envelope(const supenv_function* fn, const supenv_box* box,
                                  const supenv_envelope_options* options, supenv_report** out) {
    return guarded([&] {
        const BoxGrid grid = to_grid(box);
        check_dims(fn, grid);
        auto report = envelopes::compute_envelopes(fn->spec, grid, to_options(options));
        report.expression = fn->expression;
        auto* r = new supenv_report;
        r->passed = report.ordering_ok && report.infimum_ok;
        r->json = io::envelope_json(report);
        r->csv = io::envelope_csv(report);
        r->summary = fmt("envelope %s: %zu nodes, %zu levels, ordering %s, infimum %s\n", report.name.c_str(),
                         grid.size(), report.lambda_grid.size(), ok(report.ordering_ok), ok(report.infimum_ok));
        emit(out, r);
    });
}

supenv_status supenv_run_sweep_p(const supenv_function* fn, const supenv_box* box,
                                 const supenv_envelope_options* options, const double* p, size_t p_count,
                                 supenv_report** out) {
    return guarded([&] {
        const BoxGrid grid = to_grid(box);
        check_dims(fn, grid);
        const auto report = lp::p_sweep(fn->spec, grid, ladder(p, p_count), to_options(options));
        auto* r = new supenv_report;
        r->passed = report.monotone_ok && report.bounded_ok;
        r->json = io::sweep_json(report, source_of(fn));
        r->csv = io::sweep_csv(report);
        r->summary = fmt("sweep-p %s: %zu rungs, max gap to f_lslc %.6g, monotone %s, bounded %s\n",
                         fn->spec.name().c_str(), report.rungs.size(), report.max_gap, ok(report.monotone_ok),
                         ok(report.bounded_ok));
        emit(out, r);
    });
}

supenv_status supenv_run_gamma_min(const supenv_function* fn, double a, double b, int intervals, double slope_lo,
                                   double slope_hi, int slope_count, const double* p, size_t p_count,
                                   supenv_report** out) {
    return guarded([&] {
        require(fn != nullptr, "function is NULL");
        const auto problem = variational::BVProblem::single(fn->spec, a, b, intervals, {slope_lo, slope_hi, slope_count});
        const auto report = variational::gamma_min_sweep(problem, ladder(p, p_count));
        auto* r = new supenv_report;
        r->passed = report.passed();
        r->json = io::gamma_min_json(report, problem, source_of(fn));
        r->csv = io::gamma_min_csv(report);
        r->summary = fmt("gamma-min %s on [0,1], u(0)=%g, u(1)=%g, N=%d: f_lslc(b-a) = %s\n", fn->spec.name().c_str(), a,
                         b, intervals, io::format_value(report.relaxed_min).c_str());
        r->summary += fmt("%8s %14s %14s %14s\n", "p", "dp_min", "biconjugate", "gap");
        for (std::size_t k = 0; k < report.p_ladder.size(); ++k)
            r->summary += fmt("%8g %14.8f %14.8f %14.8f\n", report.p_ladder[k], report.minima[k], report.biconjugate[k],
                              report.gaps[k]);
        r->summary += fmt("minima monotone %s, gaps nonincreasing %s, final gap %s, biconjugate match %s\n",
                          ok(report.minima_monotone), ok(report.gaps_nonincreasing), ok(report.final_gap_ok),
                          ok(report.matches_biconjugate));
        emit(out, r);
    });
}

supenv_status supenv_run_recover(double c_lo, double c_hi, double xi, int n, supenv_report** out) {
    return guarded([&] {
        const auto seq = variational::recovery_sequence(c_lo, c_hi, xi, n);
        auto* r = new supenv_report;
        r->passed = seq.slopes_inside();
        r->json = io::recovery_json(seq);
        r->csv = io::recovery_csv(seq);
        r->summary = fmt("recover xi=%g in (%g, %g), n=%d: slope %.12g, deviation %.12g, slopes inside %s\n", xi, c_lo,
                         c_hi, n, seq.slopes.front(), seq.sup_deviation, ok(seq.slopes_inside()));
        emit(out, r);
    });
}

supenv_status supenv_run_check_h(const supenv_function* fn, const supenv_box* box, const double* probes,
                                 size_t probe_count, supenv_report** out) {
    return guarded([&] {
        const BoxGrid grid = to_grid(box);
        check_dims(fn, grid);
        require(probes != nullptr || probe_count == 0, "probes is NULL");
        const auto report = envelopes::check_hypothesis_H(fn->spec, grid, std::vector<double>(probes, probes + probe_count));
        auto* r = new supenv_report;
        // A failing (H) is a finding, not a run failure.
        r->passed = true;
        r->json = io::hypothesis_json(report, grid, source_of(fn));
        r->csv = io::hypothesis_csv(report);
        r->summary = fmt("check-h %s: (H) %s", fn->spec.name().c_str(), report.holds ? "holds" : "fails");
        if (report.failing_lambda) r->summary += fmt(" at lambda = %g", *report.failing_lambda);
        if (report.witness) {
            const auto& w = *report.witness;
            r->summary += grid.dim() == 1 ? fmt(", witness %g, %g", w[0][0], w[1][0])
                                          : fmt(", witness (%g, %g), (%g, %g)", w[0][0], w[0][1], w[1][0], w[1][1]);
        }
        r->summary += "\n";
        emit(out, r);
    });
}

supenv_status supenv_run_falsify(const supenv_function* fn, double xi, uint64_t seed, int trials, supenv_report** out) {
    return guarded([&] {
        require(fn != nullptr, "function is NULL");
        variational::FalsifyOptions opts;
        opts.seed = seed;
        opts.trials = trials;
        const auto cex = variational::weak_morrey_falsify(fn->spec, xi, opts);
        auto* r = new supenv_report;
        r->passed = true;
        r->json = io::falsify_json(cex, xi, opts, source_of(fn));
        r->csv = io::falsify_csv(cex);
        if (cex) {
            r->summary = fmt("falsify %s at xi=%g: counterexample in trial %llu, gap %.12g (re-evaluated %.12g)\n",
                             fn->spec.name().c_str(), xi, static_cast<unsigned long long>(cex->trial), cex->gap(),
                             variational::reevaluate_gap(fn->spec, xi, *cex));
        } else {
            r->summary = fmt("falsify %s at xi=%g: no counterexample in %d trials\n", fn->spec.name().c_str(), xi, trials);
        }
        emit(out, r);
    });
}

supenv_status supenv_run_battery(const char* golden_dir, int update, supenv_report** out) {
    return guarded([&] {
        require(golden_dir != nullptr, "golden_dir is NULL");
        const auto results = battery::run_golden(golden_dir, update != 0);
        auto* r = new supenv_report;
        r->passed = true;
        nlohmann::ordered_json j{{"schema", io::kSchemaVersion}, {"kind", "battery"}};
        nlohmann::ordered_json list = nlohmann::ordered_json::array();
        r->csv = "name,golden,properties_ok,passed\n";
        r->summary = fmt("%-12s %-9s %-11s %s\n", "entry", "golden", "properties", "status");
        for (const auto& res : results) {
            nlohmann::ordered_json props = nlohmann::ordered_json::object();
            bool props_ok = true;
            std::string first_failure;
            for (const auto& p : res.properties) {
                props[p.name] = p.ok;
                if (!p.ok && first_failure.empty()) first_failure = p.name + ": " + p.detail;
                props_ok = props_ok && p.ok;
            }
            list.push_back({{"name", res.name},
                            {"golden", res.golden},
                            {"properties", props},
                            {"first_failure", first_failure},
                            {"passed", res.passed()}});
            r->passed = r->passed && res.passed();
            r->csv += res.name + "," + res.golden + "," + (props_ok ? "1" : "0") + "," + (res.passed() ? "1" : "0") + "\n";
            r->summary += fmt("%-12s %-9s %-11s %s\n", res.name.c_str(), res.golden.c_str(), props_ok ? "ok" : "FAILED",
                              res.passed() ? "PASS" : "FAIL");
            if (!first_failure.empty()) r->summary += "    " + first_failure + "\n";
        }
        j["entries"] = list;
        j["passed"] = r->passed;
        r->json = j.dump(2) + "\n";
        emit(out, r);
    });
}

int supenv_report_passed(const supenv_report* report) { return report && report->passed ? 1 : 0; }

const char* supenv_report_json(const supenv_report* report) { return report ? report->json.c_str() : ""; }

const char* supenv_report_csv(const supenv_report* report) { return report ? report->csv.c_str() : ""; }

const char* supenv_report_summary(const supenv_report* report) { return report ? report->summary.c_str() : ""; }

supenv_status supenv_report_write(const supenv_report* report, const char* path, const char* format) {
    return guarded([&] {
        require(report != nullptr && path != nullptr && format != nullptr, "arguments must not be NULL");
        if (std::strcmp(format, "csv") == 0)
            io::write_file(path, report->csv);
        else if (std::strcmp(format, "json") == 0)
            io::write_file(path, report->json);
        else
            throw std::invalid_argument(std::string("format must be csv or json, got '") + format + "'");
    });
}

void supenv_report_free(supenv_report* report) { delete report; }

}  // extern "C"
