#include "core/function.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "core/parallel.hpp"

namespace supenv {

FunctionSpec::FunctionSpec(std::string name, int dim, Evaluator evaluator, bool coercive)
    : name_(std::move(name)),
      dim_(dim),
      coercive_(coercive),
      evaluator_(std::make_shared<const Evaluator>(std::move(evaluator))) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("function dimension must be 1 or 2");
    if (!*evaluator_) throw std::invalid_argument("function evaluator is empty");
}

FunctionSpec FunctionSpec::renamed(std::string name) const {
    FunctionSpec copy = *this;
    copy.name_ = std::move(name);
    return copy;
}

double euclidean_norm(const Point& p, int dim) {
    return dim == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
}

SampledFunction sample(const FunctionSpec& spec, const BoxGrid& grid) {
    if (spec.dim() != grid.dim()) {
        std::ostringstream msg;
        msg << "function '" << spec.name() << "' has dimension " << spec.dim()
            << " but the grid has dimension " << grid.dim();
        throw std::invalid_argument(msg.str());
    }
    std::vector<ExtendedValue> values(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { values[i] = spec(grid.node(i)); });
    return SampledFunction(grid, std::move(values));
}

FunctionSpec truncate_below(const FunctionSpec& spec, double m) {
    if (!(m >= 0) || !std::isfinite(m)) throw std::invalid_argument("truncation level must be finite and >= 0");
    const auto floor = ExtendedValue::finite(-m);
    std::ostringstream name;
    name << "max(" << spec.name() << ",-" << m << ")";
    return FunctionSpec(
        name.str(), spec.dim(), [spec, floor](const Point& p) { return max(spec(p), floor); },
        spec.coercive());
}

FunctionSpec coercify(const FunctionSpec& spec, int n) {
    if (n < 1) throw std::invalid_argument("coercify needs n >= 1");
    const int dim = spec.dim();
    std::ostringstream name;
    name << "max(" << spec.name() << ",|xi|/" << n << ")";
    return FunctionSpec(
        name.str(), dim,
        [spec, n, dim](const Point& p) {
            return max(spec(p), ExtendedValue::finite(euclidean_norm(p, dim) / n));
        },
        true);
}

FunctionSpec compose_phi(const FunctionSpec& spec) {
    return FunctionSpec("arctan(" + spec.name() + ")", spec.dim(), [spec](const Point& p) {
        ExtendedValue v = spec(p);
        if (v.is_infinite()) return ExtendedValue::finite(std::numbers::pi / 2);
        return ExtendedValue::finite(std::atan(v.value()));
    });
}

FunctionSpec constant_function(double c, int dim) {
    auto v = ExtendedValue::from_double(c);
    std::ostringstream name;
    name << "const(" << to_string(v) << ")";
    return FunctionSpec(name.str(), dim, [v](const Point&) { return v; });
}

}  // namespace supenv
