#include "battery/battery.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "dsl/expr.hpp"
#include "io/export.hpp"

namespace supenv::battery {

using envelopes::EnvelopeOptions;

namespace {

Entry line(std::string name, std::string expr, bool convex, bool level_convex, bool coercive_lsc) {
    Entry e{std::move(name), std::move(expr), 1, {-2.0, 0.0}, {2.0, 0.0}, {801, 1}};
    e.convex = convex;
    e.level_convex = level_convex;
    e.coercive_lsc = coercive_lsc;
    return e;
}

Entry plane(std::string name, std::string expr, int nodes, double far_field, bool coercive_lsc) {
    Entry e{std::move(name), std::move(expr), 2, {-2.0, -2.0}, {2.0, 2.0}, {nodes, nodes}};
    e.far_field = far_field;
    e.coercive_lsc = coercive_lsc;
    return e;
}

std::vector<Entry> build() {
    return {
        line("abs", "abs(x)", true, true, true),
        line("doublewell", "(x^2 - 1)^2", false, false, true),
        line("spike", "if x = 0 then 1 else abs(x)", false, false, false),
        line("step", "if x <= 0 then abs(x) else x + 1", false, true, true),
        line("upstep", "if x < 0 then abs(x) else x + 1", false, true, false),
        line("interval", "if abs(x) <= 1 then 0 else inf", true, true, true),
        line("twopoint", "if abs(x) = 1 then 0 else inf", false, false, true),
        plane("chi", "if y = 0 then 0 else (if x = 0 then (if y = 1 then 0 else 1) else 1)", 161, 2000.0, false),
        plane("dw2d", "(x^2 - 1)^2 + y^2", 41, 1.0, true),
        plane("cross", "min(abs(x), abs(y))", 41, 1.0, false),
    };
}

// Nodewise a == b within tol; both +inf counts as equal.
std::string compare_nodes(const SampledFunction& a, const SampledFunction& b, double tol) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_infinite() && b[i].is_infinite()) continue;
        if (a[i].is_infinite() != b[i].is_infinite() || std::abs(a[i].value() - b[i].value()) > tol) {
            std::ostringstream out;
            out << "node " << i << ": " << to_string(a[i]) << " vs " << to_string(b[i]);
            return out.str();
        }
    }
    return {};
}

// lower <= upper + tol at every node.
std::string compare_order(const SampledFunction& lower, const SampledFunction& upper, double tol) {
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (upper[i].is_infinite()) continue;
        if (lower[i].is_infinite() || lower[i].value() > upper[i].value() + tol) {
            std::ostringstream out;
            out << "node " << i << ": " << to_string(lower[i]) << " > " << to_string(upper[i]);
            return out.str();
        }
    }
    return {};
}

double scale_of(std::initializer_list<const SampledFunction*> arrays) {
    double s = 0.0;
    for (const auto* a : arrays) s = std::max(s, a->value_scale());
    return s;
}

struct Envelopes {
    SampledFunction ls, lc, lslc;
};

Envelopes all_envelopes(const FunctionSpec& f, const BoxGrid& g, const EnvelopeOptions& o) {
    return {envelopes::ls_envelope(f, g, o), envelopes::lc_envelope(f, g, o), envelopes::lslc_envelope(f, g, o)};
}

std::vector<double> probe_levels(const SampledFunction& s) {
    std::vector<double> v;
    for (const auto& x : s.values())
        if (x.is_finite()) v.push_back(x.value());
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    std::vector<double> out;
    const std::size_t k = std::min<std::size_t>(v.size(), 16);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t idx = k == 1 ? 0 : i * (v.size() - 1) / (k - 1);
        if (out.empty() || out.back() != v[idx]) out.push_back(v[idx]);
    }
    return out;
}

FunctionSpec shifted_up(const FunctionSpec& f) {
    return FunctionSpec(f.name() + "+1", f.dim(), [f](const Point& p) { return f(p) + ExtendedValue::finite(1.0); });
}

}  // namespace

BoxGrid Entry::grid() const { return dim == 1 ? BoxGrid(lo[0], hi[0], nodes[0]) : BoxGrid(lo, hi, nodes); }

EnvelopeOptions Entry::options() const {
    EnvelopeOptions o;
    o.far_field = far_field;
    return o;
}

FunctionSpec Entry::function() const { return dsl::to_function_spec(dsl::parse(expression), name, dim); }

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = build();
    return table;
}

const Entry& find(std::string_view name) {
    for (const auto& e : entries())
        if (e.name == name) return e;
    std::string known;
    for (const auto& e : entries()) known += (known.empty() ? "" : ", ") + e.name;
    throw std::invalid_argument("unknown battery entry '" + std::string(name) + "' (known: " + known + ")");
}

std::vector<PropertyResult> check_properties(const Entry& entry) {
    const FunctionSpec f = entry.function();
    const BoxGrid g = entry.grid();
    const EnvelopeOptions o = entry.options();
    std::vector<PropertyResult> out;
    auto record = [&](std::string name, std::string detail) { out.push_back({std::move(name), detail.empty(), detail}); };

    const SampledFunction fs = sample(f, g);
    const Envelopes env = all_envelopes(f, g, o);
    const double tol = value_tolerance(scale_of({&fs, &env.ls, &env.lc, &env.lslc}));

    {
        std::string d = compare_order(env.lslc, env.lc, tol);
        if (d.empty()) d = compare_order(env.lc, fs, tol);
        if (d.empty()) d = compare_order(env.lslc, env.ls, tol);
        if (d.empty()) d = compare_order(env.ls, fs, tol);
        if (d.empty()) d = compare_order(env.lslc, envelopes::ls_then_lc_envelope(f, g, o), tol);
        record("ordering", d);
    }

    record("idempotent_ls", compare_nodes(envelopes::ls_envelope(envelopes::ls_function(f, g, o), g, o), env.ls, tol));
    record("idempotent_lc", compare_nodes(envelopes::lc_envelope(envelopes::lc_function(f, g, o), g, o), env.lc, tol));
    record("idempotent_lslc",
           compare_nodes(envelopes::lslc_envelope(envelopes::lslc_function(f, g, o), g, o), env.lslc, tol));

    for (const auto& [label, upper] : {std::pair{"monotone_shift", shifted_up(f)}, std::pair{"monotone_coercify", coercify(f, 1)}}) {
        const Envelopes up = all_envelopes(upper, g, o);
        const double t = value_tolerance(scale_of({&env.ls, &env.lc, &env.lslc, &up.ls, &up.lc, &up.lslc}));
        std::string d = compare_order(env.ls, up.ls, t);
        if (d.empty()) d = compare_order(env.lc, up.lc, t);
        if (d.empty()) d = compare_order(env.lslc, up.lslc, t);
        record(label, d);
    }

    if (entry.level_convex) {
        std::string d = compare_nodes(env.lc, fs, tol);
        if (d.empty()) d = compare_nodes(env.lslc, env.ls, tol);
        record("level_convex_fixed_point", d);
    }

    const double geom_tol = 1e-12 * g.extent();
    const double cell = g.max_spacing() * std::sqrt(static_cast<double>(g.dim())) * (1.0 + 1e-9);
    std::string inclusion, coercive;
    for (double lambda : probe_levels(fs)) {
        std::vector<Point> mask;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (fs[i].is_finite() && fs[i].value() <= lambda) mask.push_back(g.node(i));
        const auto hull = geometry::convex_hull(mask, g.dim());
        for (std::size_t i = 0; i < g.size() && inclusion.empty(); ++i) {
            if (!geometry::contains(hull, g.node(i), geom_tol)) continue;
            if (env.lc[i].is_infinite() || env.lc[i].value() > lambda + tol) {
                std::ostringstream msg;
                msg << "lambda " << lambda << ", node " << i << ": f_lc = " << to_string(env.lc[i]);
                inclusion = msg.str();
            }
        }
        if (!entry.coercive_lsc) continue;
        for (std::size_t i = 0; i < g.size() && coercive.empty(); ++i) {
            if (env.lc[i].is_infinite() || env.lc[i].value() > lambda + tol) continue;
            if (!geometry::contains(hull, g.node(i), cell)) {
                std::ostringstream msg;
                msg << "lambda " << lambda << ", node " << i << " is more than one cell outside co L_lambda(f)";
                coercive = msg.str();
            }
        }
    }
    record("sublevel_inclusion", inclusion);
    if (entry.coercive_lsc) record("coercive_sublevels", coercive);

    {
        const auto sweep = envelopes::LevelConvexSweep::build(f, g, o);
        std::string d;
        for (std::size_t i = 0; i < g.size() && d.empty(); ++i) {
            const bool in_hull = geometry::contains(sweep.domain_hull(), g.node(i), sweep.membership_tolerance());
            if (in_hull != env.lc[i].is_finite()) d = "node " + std::to_string(i) + (in_hull ? " in hull but f_lc = inf" : " outside hull but f_lc finite");
        }
        record("domain_identity", d);
    }

    {
        std::string d;
        const ExtendedValue m = envelopes::sampled_infimum(f, g, o);
        const std::pair<const char*, ExtendedValue> seen[] = {
            {"f_ls", env.ls.min_value()},
            {"f_lc", envelopes::sampled_infimum(envelopes::lc_function(f, g, o), g, o)},
            {"f_lslc", env.lslc.min_value()}};
        for (const auto& [label, v] : seen) {
            if (v.is_infinite() != m.is_infinite() || (v.is_finite() && std::abs(v.value() - m.value()) > tol)) {
                d = std::string(label) + " infimum " + to_string(v) + " vs " + to_string(m);
                break;
            }
        }
        record("infimum_preserved", d);
    }

    if (fs.min_value().is_finite()) {
        const auto ladder = envelopes::sublevel_ladder(f, g, fs.min_value().value(), o);
        record("sublevel_ladder_monotone", ladder.monotone ? "" : "eps ladder hulls are not nested");
    }
    return out;
}

bool GoldenResult::passed() const {
    if (golden != "match" && golden != "updated") return false;
    return std::all_of(properties.begin(), properties.end(), [](const PropertyResult& p) { return p.ok; });
}

std::vector<GoldenResult> run_golden(const std::string& golden_dir, bool update) {
    std::vector<GoldenResult> results;
    if (update) std::filesystem::create_directories(golden_dir);
    for (const auto& entry : entries()) {
        GoldenResult r;
        r.name = entry.name;
        auto report = envelopes::compute_envelopes(entry.function(), entry.grid(), entry.options());
        report.expression = dsl::print(dsl::parse(entry.expression));
        const std::string json = io::envelope_json(report);
        const std::string path = (std::filesystem::path(golden_dir) / (entry.name + ".json")).string();
        if (update) {
            io::write_file(path, json);
            r.golden = "updated";
        } else if (!std::filesystem::exists(path)) {
            r.golden = "missing";
        } else {
            r.golden = io::read_file(path) == json ? "match" : "mismatch";
        }
        r.properties = check_properties(entry);
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace supenv::battery
