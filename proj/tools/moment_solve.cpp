#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hypermoment/io.hpp"
#include "hypermoment/sampling.hpp"
#include "hypermoment/solver.hpp"

using nlohmann::json;
using namespace hypermoment;

namespace {

// exit codes: 0 success, 1 input/schema error, 2 no representing measure or
// failed check, 3 unsupported curve
constexpr int kOk = 0, kInputError = 1, kNoMeasure = 2, kUnsupported = 3;

struct CommonOpts {
    double tol_psd = -1.0;
    double tol_rank = -1.0;
    double tol_residual = -1.0;
    std::string format = "text";
};

void add_common(CLI::App* sc, CommonOpts& c) {
    sc->add_option("--tol-psd", c.tol_psd, "eigenvalue tolerance of the PSD test");
    sc->add_option("--tol-rank", c.tol_rank, "relative singular-value rank cutoff");
    sc->add_option("--tol-residual", c.tol_residual, "relative residual tolerance");
    sc->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember({"text", "json"}));
}

Tolerances merge_tolerances(const std::optional<Tolerances>& from_file,
                            const CommonOpts& c) {
    Tolerances t = from_file.value_or(Tolerances{});
    if (c.tol_psd > 0) t.psd_eig = c.tol_psd;
    if (c.tol_rank > 0) t.rank_rel = c.tol_rank;
    if (c.tol_residual > 0) t.residual = c.tol_residual;
    t.validate();
    return t;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    return json::parse(in);
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write " + path);
    out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// "yx1", "yx0", or six comma-separated coefficients xx,xy,yy,x,y,const.
Conic parse_curve(const std::string& s) {
    if (s == "yx1") return canonical_conic(CanonicalCurve::yx_eq_1);
    if (s == "yx0") return canonical_conic(CanonicalCurve::yx_eq_0);
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        size_t used = 0;
        v.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument("bad coefficient: " + tok);
    }
    if (v.size() != 6)
        throw std::invalid_argument("curve must be yx1, yx0, or xx,xy,yy,x,y,const");
    return Conic{v[0], v[1], v[2], v[3], v[4], v[5]};
}

int run_analyze(const std::string& in_path, const std::string& out_path,
                const CommonOpts& opts) {
    const ProblemInput prob = problem_from_json(read_json_file(in_path));
    const Tolerances tol = merge_tolerances(prob.tolerances, opts);
    const ConicClass cls = classify(prob.conic);
    if (cls != ConicClass::nondegenerate_hyperbola &&
        cls != ConicClass::degenerate_hyperbola) {
        if (opts.format == "json")
            write_output(out_path, dump(json{{"conic_class", to_string(cls)},
                                             {"supported", false}}));
        else
            write_output(out_path, "conic: " + to_string(cls) + " (unsupported)\n");
        return kUnsupported;
    }
    const HyperbolaNormalization norm = normalize_hyperbola(prob.conic);
    const MomentSequence beta_hat = transform_moments(prob.beta, invert(norm.phi));
    const MomentMatrix M = build_moment_matrix(beta_hat, beta_hat.degree() / 2);
    const PrecheckReport pre = run_precheck(M, norm.canonical, tol);
    const CaseClassification cc = classify_case(M, norm.canonical, tol);
    log_info("analyze: conic " + to_string(cls) + ", case " + cc.tag.label());

    if (opts.format == "json") {
        json j{{"conic_class", to_string(cls)},
               {"supported", true},
               {"canonical",
                norm.canonical == CanonicalCurve::yx_eq_1 ? "yx_eq_1" : "yx_eq_0"},
               {"case", cc.tag.label()},
               {"rank", pre.rank},
               {"min_eigenvalue", pre.min_eigenvalue},
               {"checks",
                {{"psd", pre.psd},
                 {"curve_relation", pre.curve_relation},
                 {"recursive", pre.recursive},
                 {"variety_finite", pre.variety_finite},
                 {"variety_count", pre.variety_count},
                 {"variety_condition", pre.variety_condition}}},
               {"pass", pre.pass}};
        if (!pre.pass) j["failure"] = pre.failure;
        write_output(out_path, dump(j));
    } else {
        std::ostringstream os;
        os << "conic: " << to_string(cls) << "\n";
        os << "canonical model: "
           << (norm.canonical == CanonicalCurve::yx_eq_1 ? "yx = 1" : "yx = 0") << "\n";
        os << "case: " << cc.tag.label() << "\n";
        os << "rank: " << pre.rank << "\n";
        os << "checks: psd=" << (pre.psd ? "yes" : "no")
           << " curve=" << (pre.curve_relation ? "yes" : "no")
           << " recursive=" << (pre.recursive ? "yes" : "no") << " variety=";
        if (pre.variety_finite)
            os << pre.variety_count;
        else
            os << "infinite";
        os << " condition=" << (pre.variety_condition ? "yes" : "no") << "\n";
        if (!pre.pass) os << "failure: " << pre.failure << "\n";
        write_output(out_path, os.str());
    }
    return pre.pass ? kOk : kNoMeasure;
}

int run_solve(const std::string& in_path, const std::string& out_path,
              const std::string& measure_path, const CommonOpts& opts) {
    const ProblemInput prob = problem_from_json(read_json_file(in_path));
    const Tolerances tol = merge_tolerances(prob.tolerances, opts);
    const GeneralOutcome out = solve(prob.beta, prob.conic, tol);
    const Report rep = make_report(out);
    log_info("solve: status " + rep.status + ", case " + rep.case_label);
    write_output(out_path,
                 opts.format == "json" ? dump(report_to_json(rep)) : render_text(rep));
    if (!measure_path.empty() && out.canonical.status != SolveStatus::no_measure)
        write_output(measure_path, dump(measure_to_json(out.measure)));
    return out.canonical.status == SolveStatus::no_measure ? kNoMeasure : kOk;
}

int run_generate(const std::string& curve, int degree, int atoms, std::uint64_t seed,
                 const std::string& out_path, const std::string& measure_path,
                 const CommonOpts& opts) {
    const Conic Q = parse_curve(curve);
    SampleSpec spec;
    spec.degree = degree;
    spec.atom_count = atoms;
    spec.seed = seed;
    SampledProblem sp;
    if (curve == "yx1" || curve == "yx0") {
        spec.curve = curve == "yx1" ? CanonicalCurve::yx_eq_1 : CanonicalCurve::yx_eq_0;
        sp = sample_problem(spec);
    } else {
        sp = sample_problem(spec, Q);
    }
    log_info("generate: " + std::to_string(sp.measure.size()) + " atoms, degree " +
             std::to_string(degree));
    write_output(out_path, dump(problem_to_json(sp.beta, Q)));
    if (!measure_path.empty()) write_output(measure_path, dump(measure_to_json(sp.measure)));
    (void)opts;
    return kOk;
}

int run_verify(const std::string& problem_path, const std::string& measure_path,
               const CommonOpts& opts) {
    const ProblemInput prob = problem_from_json(read_json_file(problem_path));
    const Tolerances tol = merge_tolerances(prob.tolerances, opts);
    const AtomicMeasure mu = measure_from_json(read_json_file(measure_path));
    for (const Atom& a : mu.atoms) {
        const double qv = prob.conic.eval(a.x, a.y);
        const double sc = prob.conic.scale() *
                          std::max(1.0, a.x * a.x + a.y * a.y);
        if (std::abs(qv) > 1e-6 * std::max(1.0, sc)) {
            std::cerr << "atom (" << a.x << ", " << a.y << ") is off the curve\n";
            return kNoMeasure;
        }
    }
    const MeasureCheck check = verify_measure(mu, prob.beta, tol);
    if (opts.format == "json")
        write_output("", dump(json{{"atoms", mu.size()},
                                   {"max_residual", check.max_residual},
                                   {"ok", check.ok}}));
    else
        write_output("", "atoms: " + std::to_string(mu.size()) + "\nmax residual: " +
                             std::to_string(check.max_residual) +
                             "\nok: " + (check.ok ? "yes" : "no") + "\n");
    return check.ok ? kOk : kNoMeasure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"moment_solve: truncated moment problems on hyperbolic conics"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string in_path, out_path, measure_path;

    CLI::App* analyze = app.add_subcommand(
        "analyze", "classify the conic and check the necessary moment conditions");
    analyze->add_option("problem", in_path, "problem JSON file")->required();
    analyze->add_option("-o,--output", out_path, "write the report here (default stdout)");
    add_common(analyze, opts);

    CLI::App* solve_cmd = app.add_subcommand(
        "solve", "decide existence and construct a minimal representing measure");
    solve_cmd->add_option("problem", in_path, "problem JSON file")->required();
    solve_cmd->add_option("-o,--output", out_path, "write the report here (default stdout)");
    solve_cmd->add_option("--measure-out", measure_path, "write the measure JSON here");
    add_common(solve_cmd, opts);

    std::string curve = "yx1";
    int degree = 4, atoms = 3;
    std::uint64_t seed = 0;
    CLI::App* generate = app.add_subcommand(
        "generate", "sample a measure on a curve and emit its moment problem");
    generate->add_option("--curve", curve, "yx1, yx0, or xx,xy,yy,x,y,const");
    generate->add_option("--degree", degree, "moment truncation degree (even)")
        ->check(CLI::PositiveNumber);
    generate->add_option("--atoms", atoms, "number of atoms")->check(CLI::PositiveNumber);
    generate->add_option("--seed", seed, "random seed");
    generate->add_option("-o,--output", out_path, "write the problem here (default stdout)");
    generate->add_option("--measure-out", measure_path, "write the sampled measure here");
    add_common(generate, opts);

    std::string verify_measure_path;
    CLI::App* verify = app.add_subcommand(
        "verify", "check a measure file against a problem file");
    verify->add_option("problem", in_path, "problem JSON file")->required();
    verify->add_option("measure", verify_measure_path, "measure JSON file")->required();
    add_common(verify, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return run_analyze(in_path, out_path, opts);
        if (solve_cmd->parsed()) return run_solve(in_path, out_path, measure_path, opts);
        if (generate->parsed())
            return run_generate(curve, degree, atoms, seed, out_path, measure_path, opts);
        if (verify->parsed()) return run_verify(in_path, verify_measure_path, opts);
    } catch (const UnsupportedCurve& e) {
        std::cerr << "unsupported curve: " << e.what() << "\n";
        return kUnsupported;
    } catch (const NoRepresentingMeasure& e) {
        std::cerr << "no representing measure: " << e.what() << "\n";
        return kNoMeasure;
    } catch (const json::parse_error& e) {
        std::cerr << "JSON parse error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}
