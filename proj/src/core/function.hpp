#pragma once

#include <functional>
#include <memory>
#include <string>

#include "core/grid.hpp"

namespace supenv {

// An evaluable f: R^n -> (-inf, +inf], n in {1, 2}. Copies share the evaluator;
// evaluators must be pure so that sampling is reproducible and thread-safe.
class FunctionSpec {
public:
    using Evaluator = std::function<ExtendedValue(const Point&)>;

    FunctionSpec(std::string name, int dim, Evaluator evaluator, bool coercive = false);

    const std::string& name() const { return name_; }
    int dim() const { return dim_; }
    bool coercive() const { return coercive_; }

    ExtendedValue operator()(const Point& p) const { return (*evaluator_)(p); }
    ExtendedValue operator()(double x) const {
        Point p;
        p[0] = x;
        return (*evaluator_)(p);
    }

    FunctionSpec renamed(std::string name) const;

private:
    std::string name_;
    int dim_;
    bool coercive_;
    std::shared_ptr<const Evaluator> evaluator_;
};

// values[i] = spec(node(i)). Throws std::invalid_argument on a dimension mismatch.
SampledFunction sample(const FunctionSpec& spec, const BoxGrid& grid);

// max{f, -m}
FunctionSpec truncate_below(const FunctionSpec& spec, double m);
// max{f, |xi| / n}; always coercive.
FunctionSpec coercify(const FunctionSpec& spec, int n);
// arctan o f with arctan(+inf) = pi/2.
FunctionSpec compose_phi(const FunctionSpec& spec);

FunctionSpec constant_function(double c, int dim);

double euclidean_norm(const Point& p, int dim);

}  // namespace supenv
