#include "io/export.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace supenv::io {

using Json = nlohmann::ordered_json;

namespace {

double clean(double v) { return v == 0.0 ? 0.0 : v; }

Json num(double v) {
    if (std::isinf(v) && v > 0) return "inf";
    if (!std::isfinite(v)) return nullptr;
    return clean(v);
}

Json ev(const ExtendedValue& v) { return v.is_infinite() ? Json("inf") : Json(clean(v.value())); }

Json numbers(const std::vector<double>& xs) {
    Json out = Json::array();
    for (double x : xs) out.push_back(num(x));
    return out;
}

Json values(const SampledFunction& s) {
    Json out = Json::array();
    for (const auto& v : s.values()) out.push_back(ev(v));
    return out;
}

Json point(const Point& p, int dim) {
    Json out = Json::array();
    for (int a = 0; a < dim; ++a) out.push_back(clean(p[static_cast<std::size_t>(a)]));
    return out;
}

Json polytope(const geometry::Polytope& poly) {
    Json vs = Json::array();
    for (const auto& v : poly.vertices()) vs.push_back(point(v, poly.dim()));
    return Json{{"dim", poly.dim()}, {"vertices", vs}};
}

Json grid_json(const BoxGrid& g) {
    Json lo = Json::array(), hi = Json::array(), nodes = Json::array();
    for (int a = 0; a < g.dim(); ++a) {
        lo.push_back(g.lo(a));
        hi.push_back(g.hi(a));
        nodes.push_back(g.nodes(a));
    }
    return Json{{"dim", g.dim()}, {"lo", lo}, {"hi", hi}, {"nodes", nodes}};
}

Json header(const char* kind) { return Json{{"schema", kSchemaVersion}, {"kind", kind}}; }

Json source_json(const Source& s) { return Json{{"name", s.name}, {"expression", s.expression}}; }

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string coords_header(int dim) { return dim == 1 ? "x" : "x,y"; }

std::string coords(const BoxGrid& g, std::size_t i) {
    const Point p = g.node(i);
    std::string out = format_value(p[0]);
    if (g.dim() == 2) out += "," + format_value(p[1]);
    return out;
}

}  // namespace

std::string format_value(double v) {
    if (std::isinf(v) && v > 0) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", clean(v));
    return buf;
}

std::string format_value(const ExtendedValue& v) { return v.is_infinite() ? "inf" : format_value(v.value()); }

std::string envelope_csv(const envelopes::EnvelopeReport& r) {
    std::string out = coords_header(r.grid.dim()) + ",f,f_ls,f_lc,f_lslc\n";
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        out += coords(r.grid, i);
        for (const SampledFunction* s : {&r.f, &r.f_ls, &r.f_lc, &r.f_lslc}) out += "," + format_value((*s)[i]);
        out += '\n';
    }
    return out;
}

std::string envelope_json(const envelopes::EnvelopeReport& r) {
    Json j = header("envelope");
    j["function"] = source_json({r.name, r.expression});
    j["grid"] = grid_json(r.grid);
    j["options"] = Json{{"refine_depth", r.options.refine_depth},
                        {"approach_depth", r.options.resolved_approach_depth(r.grid.dim())},
                        {"far_field", r.options.far_field},
                        {"max_levels", r.options.max_levels}};
    j["lambda_grid"] = numbers(r.lambda_grid);
    Json hulls = Json::array();
    for (const auto& h : r.min_sublevel.hulls) hulls.push_back(polytope(h));
    j["min_sublevel"] = Json{{"lambda", num(r.min_sublevel.lambda)},
                             {"eps", numbers(r.min_sublevel.eps)},
                             {"hulls", hulls},
                             {"monotone", r.min_sublevel.monotone}};
    j["domain_hull"] = polytope(r.domain_hull);
    j["ordering_ok"] = r.ordering_ok;
    j["infimum_ok"] = r.infimum_ok;
    j["f"] = values(r.f);
    j["f_ls"] = values(r.f_ls);
    j["f_lc"] = values(r.f_lc);
    j["f_lslc"] = values(r.f_lslc);
    return dump(j);
}

std::string sweep_csv(const lp::SweepReport& r) {
    const BoxGrid& g = r.target.grid();
    std::string out = coords_header(g.dim());
    for (double p : r.p_ladder) out += ",p" + format_value(p);
    out += ",sup,f_lslc\n";
    for (std::size_t i = 0; i < g.size(); ++i) {
        out += coords(g, i);
        for (const auto& rung : r.rungs) out += "," + format_value(rung[i]);
        out += "," + format_value(r.sup_array[i]) + "," + format_value(r.target[i]) + "\n";
    }
    return out;
}

std::string sweep_json(const lp::SweepReport& r, const Source& source) {
    Json j = header("sweep");
    j["function"] = source_json(source);
    j["grid"] = grid_json(r.target.grid());
    j["p_ladder"] = numbers(r.p_ladder);
    j["max_gap"] = num(r.max_gap);
    j["monotone_ok"] = r.monotone_ok;
    j["bounded_ok"] = r.bounded_ok;
    Json rungs = Json::array();
    for (const auto& rung : r.rungs) rungs.push_back(values(rung));
    j["rungs"] = rungs;
    j["sup"] = values(r.sup_array);
    j["f_lslc"] = values(r.target);
    return dump(j);
}

std::string gamma_min_csv(const variational::GammaMinReport& r) {
    std::string out = "p,dp_min,biconjugate,gap\n";
    for (std::size_t k = 0; k < r.p_ladder.size(); ++k) {
        out += format_value(r.p_ladder[k]) + "," + format_value(r.minima[k]) + ",";
        out += (k < r.biconjugate.size() ? format_value(r.biconjugate[k]) : std::string()) + ",";
        out += format_value(r.gaps[k]) + "\n";
    }
    return out;
}

std::string gamma_min_json(const variational::GammaMinReport& r, const variational::BVProblem& problem,
                           const Source& source) {
    Json j = header("gamma-min");
    j["function"] = source_json(source);
    Json pieces = Json::array();
    for (const auto& piece : problem.pieces) pieces.push_back(Json{{"name", piece.f.name()}, {"cells", piece.cells}});
    j["problem"] = Json{{"a", problem.a},
                        {"b", problem.b},
                        {"intervals", problem.intervals},
                        {"slopes", Json{{"lo", problem.slopes.lo}, {"hi", problem.slopes.hi}, {"count", problem.slopes.count}}},
                        {"pieces", pieces}};
    j["p_ladder"] = numbers(r.p_ladder);
    j["dp_minima"] = numbers(r.minima);
    j["biconjugate"] = numbers(r.biconjugate);
    j["relaxed_min"] = ev(r.relaxed_min);
    j["gaps"] = numbers(r.gaps);
    j["final_gap"] = num(r.gaps.back());
    j["tolerance"] = variational::kTolMin;
    j["minima_monotone"] = r.minima_monotone;
    j["gaps_nonincreasing"] = r.gaps_nonincreasing;
    j["final_gap_ok"] = r.final_gap_ok;
    j["matches_biconjugate"] = r.matches_biconjugate;
    j["passed"] = r.passed();
    return dump(j);
}

std::string recovery_csv(const variational::RecoverySequence& r) {
    std::string out = "t,u\n";
    for (std::size_t i = 0; i < r.breakpoints.size(); ++i)
        out += format_value(r.breakpoints[i]) + "," + format_value(r.values[i]) + "\n";
    return out;
}

std::string recovery_json(const variational::RecoverySequence& r) {
    Json j = header("recovery");
    j["c"] = Json::array({r.c_lo, r.c_hi});
    j["xi"] = r.xi;
    j["n"] = r.n;
    j["breakpoints"] = numbers(r.breakpoints);
    j["values"] = numbers(r.values);
    j["slopes"] = numbers(r.slopes);
    j["deviation"] = num(r.sup_deviation);
    j["slopes_inside"] = r.slopes_inside();
    return dump(j);
}

std::string hypothesis_csv(const envelopes::HypothesisHReport& r) {
    std::string out = "lambda,convex_ok,interior_ok\n";
    for (const auto& p : r.probes)
        out += format_value(p.lambda) + "," + (p.convex_ok ? "1" : "0") + "," + (p.interior_ok ? "1" : "0") + "\n";
    return out;
}

std::string hypothesis_json(const envelopes::HypothesisHReport& r, const BoxGrid& grid, const Source& source) {
    Json j = header("hypothesis-h");
    j["function"] = source_json(source);
    j["grid"] = grid_json(grid);
    j["holds"] = r.holds;
    j["failing_lambda"] = r.failing_lambda ? num(*r.failing_lambda) : Json(nullptr);
    j["witness"] = r.witness ? Json::array({point((*r.witness)[0], grid.dim()), point((*r.witness)[1], grid.dim())})
                             : Json(nullptr);
    j["violation"] = r.violation ? point(*r.violation, grid.dim()) : Json(nullptr);
    Json probes = Json::array();
    for (const auto& p : r.probes)
        probes.push_back(Json{{"lambda", num(p.lambda)}, {"convex_ok", p.convex_ok}, {"interior_ok", p.interior_ok}});
    j["probes"] = probes;
    return dump(j);
}

std::string falsify_csv(const std::optional<variational::Counterexample>& c) {
    std::string out = "t,phi\n";
    if (c)
        for (std::size_t i = 0; i < c->breakpoints.size(); ++i)
            out += format_value(c->breakpoints[i]) + "," + format_value(c->values[i]) + "\n";
    return out;
}

std::string falsify_json(const std::optional<variational::Counterexample>& c, double xi,
                         const variational::FalsifyOptions& options, const Source& source) {
    Json j = header("falsify");
    j["function"] = source_json(source);
    j["xi"] = xi;
    j["seed"] = options.seed;
    j["trials"] = options.trials;
    j["max_pieces"] = options.max_pieces;
    j["amplitude"] = options.amplitude;
    j["found"] = c.has_value();
    if (c) {
        j["counterexample"] = Json{{"trial", c->trial},
                                   {"breakpoints", numbers(c->breakpoints)},
                                   {"values", numbers(c->values)},
                                   {"slopes", numbers(c->slopes)},
                                   {"f_at_xi", num(c->f_at_xi)},
                                   {"sup_value", num(c->sup_value)},
                                   {"gap", num(c->gap())}};
    } else {
        j["counterexample"] = nullptr;
    }
    return dump(j);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace supenv::io
