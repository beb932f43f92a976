#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "envelopes/envelopes.hpp"

namespace supenv::battery {

struct Entry {
    std::string name;
    std::string expression;
    int dim;
    std::array<double, 2> lo, hi;
    std::array<int, 2> nodes;
    double far_field = 1.0;
    bool convex = false;
    bool level_convex = false;
    // lsc and coercive: sublevels of f and f_lc agree up to one cell.
    bool coercive_lsc = false;
    bool nonnegative = true;

    BoxGrid grid() const;
    envelopes::EnvelopeOptions options() const;
    FunctionSpec function() const;
};

const std::vector<Entry>& entries();
// Throws std::invalid_argument naming the unknown entry.
const Entry& find(std::string_view name);

struct PropertyResult {
    std::string name;
    bool ok;
    std::string detail;  // first failing node or level, empty on success
};

// Every envelope invariant at every node of the entry's grid.
std::vector<PropertyResult> check_properties(const Entry& entry);

struct GoldenResult {
    std::string name;
    // "match", "mismatch", "missing" or "updated"
    std::string golden;
    std::vector<PropertyResult> properties;
    bool passed() const;
};

// Runs every entry: envelope JSON against <golden_dir>/<name>.json plus the
// property suite. With update, golden files are rewritten instead of compared.
std::vector<GoldenResult> run_golden(const std::string& golden_dir, bool update);

}  // namespace supenv::battery
