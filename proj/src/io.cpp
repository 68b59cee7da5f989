#include "hypermoment/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <vector>

namespace hypermoment {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) { throw std::invalid_argument(msg); }

double require_number(const json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key)) bad(ctx + ": missing \"" + key + "\"");
    const json& v = j.at(key);
    if (!v.is_number()) bad(ctx + ": \"" + key + "\" must be a number");
    return v.get<double>();
}

int require_index(const json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key)) bad(ctx + ": missing \"" + key + "\"");
    const json& v = j.at(key);
    if (!v.is_number_integer()) bad(ctx + ": \"" + key + "\" must be an integer");
    long long k = v.get<long long>();
    if (k < 0) bad(ctx + ": \"" + key + "\" must be nonnegative");
    return static_cast<int>(k);
}

std::string fmt(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

}  // namespace

ProblemInput problem_from_json(const json& j) {
    if (!j.is_object()) bad("problem: top level must be an object");
    const int degree = require_index(j, "degree", "problem");
    if (degree < 2 || degree % 2 != 0)
        bad("problem: \"degree\" must be even and at least 2");

    if (!j.contains("moments") || !j.at("moments").is_array())
        bad("problem: \"moments\" must be an array");
    ProblemInput out{MomentSequence(degree), {}, std::nullopt};
    std::vector<bool> seen(monomials_upto(degree).size(), false);
    for (const json& e : j.at("moments")) {
        if (!e.is_object()) bad("problem: each moment entry must be an object");
        const int i = require_index(e, "i", "moment entry");
        const int jj = require_index(e, "j", "moment entry");
        const double v = require_number(e, "value", "moment entry");
        if (i + jj > degree)
            bad("problem: moment (" + std::to_string(i) + "," + std::to_string(jj) +
                ") exceeds the stated degree");
        const int pos = monomial_position(i, jj);
        if (seen[pos])
            bad("problem: duplicate moment (" + std::to_string(i) + "," +
                std::to_string(jj) + ")");
        seen[pos] = true;
        out.beta.at(i, jj) = v;
    }
    for (Mono m : monomials_upto(degree))
        if (!seen[monomial_position(m)])
            bad("problem: missing moment (" + std::to_string(m.i) + "," +
                std::to_string(m.j) + ")");

    if (!j.contains("conic") || !j.at("conic").is_object())
        bad("problem: \"conic\" must be an object");
    const json& c = j.at("conic");
    out.conic.xx = require_number(c, "xx", "conic");
    out.conic.xy = require_number(c, "xy", "conic");
    out.conic.yy = require_number(c, "yy", "conic");
    out.conic.x = require_number(c, "x", "conic");
    out.conic.y = require_number(c, "y", "conic");
    out.conic.c = require_number(c, "const", "conic");

    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        if (!t.is_object()) bad("problem: \"tolerances\" must be an object");
        Tolerances tol;
        for (auto it = t.begin(); it != t.end(); ++it) {
            if (it.key() == "psd_eig")
                tol.psd_eig = it.value().get<double>();
            else if (it.key() == "rank_rel")
                tol.rank_rel = it.value().get<double>();
            else if (it.key() == "residual")
                tol.residual = it.value().get<double>();
            else if (it.key() == "root_imag")
                tol.root_imag = it.value().get<double>();
            else if (it.key() == "dedupe")
                tol.dedupe = it.value().get<double>();
            else
                bad("problem: unknown tolerance \"" + it.key() + "\"");
        }
        tol.validate();
        out.tolerances = tol;
    }
    return out;
}

json problem_to_json(const MomentSequence& beta, const Conic& conic,
                     const std::optional<Tolerances>& tolerances) {
    json moments = json::array();
    for (Mono m : monomials_upto(beta.degree()))
        moments.push_back({{"i", m.i}, {"j", m.j}, {"value", beta(m)}});
    json j{{"degree", beta.degree()},
           {"moments", std::move(moments)},
           {"conic",
            {{"xx", conic.xx},
             {"xy", conic.xy},
             {"yy", conic.yy},
             {"x", conic.x},
             {"y", conic.y},
             {"const", conic.c}}}};
    if (tolerances) {
        j["tolerances"] = {{"psd_eig", tolerances->psd_eig},
                           {"rank_rel", tolerances->rank_rel},
                           {"residual", tolerances->residual},
                           {"root_imag", tolerances->root_imag},
                           {"dedupe", tolerances->dedupe}};
    }
    return j;
}

AtomicMeasure measure_from_json(const json& j) {
    if (!j.is_object() || !j.contains("atoms") || !j.at("atoms").is_array())
        bad("measure: \"atoms\" must be an array");
    AtomicMeasure mu;
    for (const json& e : j.at("atoms")) {
        if (!e.is_object()) bad("measure: each atom must be an object");
        mu.atoms.push_back({require_number(e, "x", "atom"), require_number(e, "y", "atom"),
                            require_number(e, "density", "atom")});
    }
    return mu;
}

json measure_to_json(const AtomicMeasure& mu) {
    json atoms = json::array();
    for (const Atom& a : mu.atoms)
        atoms.push_back({{"x", a.x}, {"y", a.y}, {"density", a.density}});
    return json{{"atoms", std::move(atoms)}};
}

bool Report::operator==(const Report& other) const {
    auto same_measure = [](const AtomicMeasure& a, const AtomicMeasure& b) {
        if (a.atoms.size() != b.atoms.size()) return false;
        for (size_t k = 0; k < a.atoms.size(); ++k)
            if (a.atoms[k].x != b.atoms[k].x || a.atoms[k].y != b.atoms[k].y ||
                a.atoms[k].density != b.atoms[k].density)
                return false;
        return true;
    };
    return conic_class == other.conic_class && status == other.status &&
           case_label == other.case_label && swapped_xy == other.swapped_xy &&
           psd == other.psd && curve_relation == other.curve_relation &&
           recursive == other.recursive && variety_finite == other.variety_finite &&
           variety_count == other.variety_count &&
           variety_condition == other.variety_condition && rank == other.rank &&
           min_eigenvalue == other.min_eigenvalue && parameters.p == other.parameters.p &&
           parameters.q == other.parameters.q && parameters.u == other.parameters.u &&
           parameters.v == other.parameters.v && parameters.r == other.parameters.r &&
           parameters.s == other.parameters.s && same_measure(measure, other.measure) &&
           max_residual == other.max_residual && warnings == other.warnings &&
           failure == other.failure;
}

Report make_report(const GeneralOutcome& out) {
    Report r;
    r.conic_class = to_string(out.conic_class);
    r.status = to_string(out.canonical.status);
    r.case_label = out.canonical.tag.label();
    r.swapped_xy = out.canonical.swapped_xy;
    r.psd = out.canonical.precheck.psd;
    r.curve_relation = out.canonical.precheck.curve_relation;
    r.recursive = out.canonical.precheck.recursive;
    r.variety_finite = out.canonical.precheck.variety_finite;
    r.variety_count = out.canonical.precheck.variety_count;
    r.variety_condition = out.canonical.precheck.variety_condition;
    r.rank = out.canonical.rank;
    r.min_eigenvalue = out.canonical.precheck.min_eigenvalue;
    r.parameters = out.canonical.params;
    r.measure = out.measure;
    r.max_residual = out.canonical.max_residual;
    r.warnings = out.canonical.warnings;
    r.failure = out.canonical.failure;
    return r;
}

json report_to_json(const Report& r) {
    json params = json::object();
    auto put = [&](const char* k, const std::optional<double>& v) {
        if (v) params[k] = *v;
    };
    put("p", r.parameters.p);
    put("q", r.parameters.q);
    put("u", r.parameters.u);
    put("v", r.parameters.v);
    put("r", r.parameters.r);
    put("s", r.parameters.s);
    return json{{"conic_class", r.conic_class},
                {"status", r.status},
                {"case", r.case_label},
                {"swapped_xy", r.swapped_xy},
                {"checks",
                 {{"psd", r.psd},
                  {"curve_relation", r.curve_relation},
                  {"recursive", r.recursive},
                  {"variety_finite", r.variety_finite},
                  {"variety_count", r.variety_count},
                  {"variety_condition", r.variety_condition}}},
                {"rank", r.rank},
                {"min_eigenvalue", r.min_eigenvalue},
                {"parameters", std::move(params)},
                {"measure", measure_to_json(r.measure)},
                {"max_residual", r.max_residual},
                {"warnings", r.warnings},
                {"failure", r.failure}};
}

Report report_from_json(const json& j) {
    Report r;
    r.conic_class = j.at("conic_class").get<std::string>();
    r.status = j.at("status").get<std::string>();
    r.case_label = j.at("case").get<std::string>();
    r.swapped_xy = j.at("swapped_xy").get<bool>();
    const json& c = j.at("checks");
    r.psd = c.at("psd").get<bool>();
    r.curve_relation = c.at("curve_relation").get<bool>();
    r.recursive = c.at("recursive").get<bool>();
    r.variety_finite = c.at("variety_finite").get<bool>();
    r.variety_count = c.at("variety_count").get<long long>();
    r.variety_condition = c.at("variety_condition").get<bool>();
    r.rank = j.at("rank").get<int>();
    r.min_eigenvalue = j.at("min_eigenvalue").get<double>();
    const json& p = j.at("parameters");
    auto opt = [&](const char* k) -> std::optional<double> {
        if (p.contains(k)) return p.at(k).get<double>();
        return std::nullopt;
    };
    r.parameters.p = opt("p");
    r.parameters.q = opt("q");
    r.parameters.u = opt("u");
    r.parameters.v = opt("v");
    r.parameters.r = opt("r");
    r.parameters.s = opt("s");
    r.measure = measure_from_json(j.at("measure"));
    r.max_residual = j.at("max_residual").get<double>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.failure = j.at("failure").get<std::string>();
    return r;
}

std::string render_text(const Report& r) {
    std::ostringstream os;
    os << "conic: " << r.conic_class << "\n";
    os << "status: " << r.status;
    if (!r.case_label.empty()) os << " (case " << r.case_label << ")";
    if (r.swapped_xy) os << " [swapped coordinates]";
    os << "\n";
    os << "checks: psd=" << (r.psd ? "yes" : "no")
       << " curve=" << (r.curve_relation ? "yes" : "no")
       << " recursive=" << (r.recursive ? "yes" : "no") << " variety=";
    if (r.variety_finite)
        os << r.variety_count;
    else
        os << "infinite";
    os << " condition=" << (r.variety_condition ? "yes" : "no") << "\n";
    os << "rank: " << r.rank << " (min eigenvalue " << fmt(r.min_eigenvalue) << ")\n";
    std::ostringstream ps;
    auto put = [&](const char* k, const std::optional<double>& v) {
        if (v) ps << " " << k << "=" << fmt(*v);
    };
    put("p", r.parameters.p);
    put("q", r.parameters.q);
    put("u", r.parameters.u);
    put("v", r.parameters.v);
    put("r", r.parameters.r);
    put("s", r.parameters.s);
    if (!ps.str().empty()) os << "parameters:" << ps.str() << "\n";
    if (!r.measure.atoms.empty()) {
        os << "atoms (" << r.measure.atoms.size() << "):\n";
        for (const Atom& a : r.measure.atoms)
            os << "  x=" << fmt(a.x) << "  y=" << fmt(a.y) << "  density=" << fmt(a.density)
               << "\n";
        os << "max residual: " << fmt(r.max_residual) << "\n";
    }
    for (const std::string& w : r.warnings) os << "warning: " << w << "\n";
    if (!r.failure.empty()) os << "failure: " << r.failure << "\n";
    return os.str();
}

LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("MOMENT_SOLVE_LOG");
        if (!env) return LogLevel::quiet;
        std::string s(env);
        if (s == "debug") return LogLevel::debug;
        if (s == "info") return LogLevel::info;
        return LogLevel::quiet;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::info) std::cerr << "[info] " << msg << "\n";
}

void log_debug(const std::string& msg) {
    if (log_level() >= LogLevel::debug) std::cerr << "[debug] " << msg << "\n";
}

}  // namespace hypermoment
