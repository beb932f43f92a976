#pragma once

#include <stdexcept>
#include <string>

#include "envelopes/envelopes.hpp"
#include "lp/lp_calculus.hpp"
#include "variational/variational.hpp"

namespace supenv::io {

inline constexpr int kSchemaVersion = 1;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Where a report's function came from.
struct Source {
    std::string name;
    std::string expression;
};

// 12 significant digits, `inf` for +inf, -0 printed as 0.
std::string format_value(const ExtendedValue& v);
std::string format_value(double v);

std::string envelope_csv(const envelopes::EnvelopeReport& r);
std::string envelope_json(const envelopes::EnvelopeReport& r);

std::string sweep_csv(const lp::SweepReport& r);
std::string sweep_json(const lp::SweepReport& r, const Source& source);

std::string gamma_min_csv(const variational::GammaMinReport& r);
std::string gamma_min_json(const variational::GammaMinReport& r, const variational::BVProblem& problem, const Source& source);

std::string recovery_csv(const variational::RecoverySequence& r);
std::string recovery_json(const variational::RecoverySequence& r);

std::string hypothesis_csv(const envelopes::HypothesisHReport& r);
std::string hypothesis_json(const envelopes::HypothesisHReport& r, const BoxGrid& grid, const Source& source);

std::string falsify_csv(const std::optional<variational::Counterexample>& c);
std::string falsify_json(const std::optional<variational::Counterexample>& c, double xi,
                         const variational::FalsifyOptions& options, const Source& source);

// Whole-file write; throws IoError naming the path.
void write_file(const std::string& path, const std::string& content);
// Throws IoError if the file cannot be opened.
std::string read_file(const std::string& path);

}  // namespace supenv::io
