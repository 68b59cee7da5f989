#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypermoment/conic.hpp"
#include "hypermoment/measure.hpp"
#include "hypermoment/moment_sequence.hpp"
#include "hypermoment/solver.hpp"
#include "hypermoment/tolerances.hpp"

namespace hypermoment {

/// Problem file: {"degree": 2n, "moments": [{"i","j","value"}, ...],
/// "conic": {"xx","xy","yy","x","y","const"}, "tolerances": {...} (optional)}.
/// Every moment up to the stated degree must be present exactly once.
struct ProblemInput {
    MomentSequence beta;
    Conic conic;
    std::optional<Tolerances> tolerances;
};

/// Parse / serialize problems. Schema violations raise std::invalid_argument
/// with a message naming the offending field.
ProblemInput problem_from_json(const nlohmann::json& j);
nlohmann::json problem_to_json(const MomentSequence& beta, const Conic& conic,
                               const std::optional<Tolerances>& tolerances = std::nullopt);

/// Measure file: {"atoms": [{"x","y","density"}, ...]}.
AtomicMeasure measure_from_json(const nlohmann::json& j);
nlohmann::json measure_to_json(const AtomicMeasure& mu);

/// Flat, serialization-friendly view of a solve, sufficient to reconstruct the
/// verdict without the solver state.
struct Report {
    std::string conic_class;
    std::string status;
    std::string case_label;
    bool swapped_xy = false;

    bool psd = false;
    bool curve_relation = false;
    bool recursive = false;
    bool variety_finite = false;
    long long variety_count = -1;
    bool variety_condition = false;

    int rank = 0;
    double min_eigenvalue = 0.0;
    SolverParameters parameters;
    AtomicMeasure measure;
    double max_residual = 0.0;
    std::vector<std::string> warnings;
    std::string failure;

    bool operator==(const Report& other) const;
};

Report make_report(const GeneralOutcome& out);

nlohmann::json report_to_json(const Report& r);
Report report_from_json(const nlohmann::json& j);

/// Multi-line human-readable rendering of the report.
std::string render_text(const Report& r);

/// Logging controlled by the MOMENT_SOLVE_LOG environment variable
/// (quiet | info | debug, default quiet). Messages go to stderr.
enum class LogLevel { quiet = 0, info = 1, debug = 2 };
LogLevel log_level();
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace hypermoment
