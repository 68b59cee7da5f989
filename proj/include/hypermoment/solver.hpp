#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hypermoment/conic.hpp"
#include "hypermoment/errors.hpp"
#include "hypermoment/linalg.hpp"
#include "hypermoment/measure.hpp"
#include "hypermoment/moment_matrix.hpp"
#include "hypermoment/tolerances.hpp"
#include "hypermoment/variety.hpp"

namespace hypermoment {

enum class SolveStatus {
    no_measure,        ///< a necessary condition failed; no representing measure
    already_flat,      ///< rank M(n-1) == rank M(n); closure is determined
    flat_at_n_plus_1,  ///< one-step flat extension M(n+1)
    flat_at_n_plus_2,  ///< rank grows once at M(n+1), then M(n+2) is flat
};

std::string to_string(SolveStatus s);

/// Where the degree-lex scan of S = {1, X, Y, X^2, Y^2, ..., X^n, Y^n} first
/// finds a column dependent on the earlier S columns.
struct CaseTag {
    enum class Kind {
        pure_x_power,  ///< first dependence at X^k
        pure_y_power,  ///< first dependence at Y^k, k < n
        y_top_power,   ///< first dependence at Y^n
        full_s_basis,  ///< S is independent: rank is 2n+1
        none,          ///< not classified (precheck failed earlier)
    };
    CanonicalCurve curve = CanonicalCurve::yx_eq_1;
    Kind kind = Kind::none;
    int k = -1;

    /// Stable report label: "I".."IV" on yx = 1 and "deg-I".."deg-III" on yx = 0.
    std::string label() const;
};

/// Necessary conditions evaluated on M(n) before any extension is attempted.
struct PrecheckReport {
    bool psd = false;
    double min_eigenvalue = 0.0;
    bool curve_relation = false;  ///< YX = 1 (resp. YX = 0) holds among the columns
    bool recursive = false;
    int rank = 0;
    bool rank_gap_warning = false;
    bool variety_finite = false;
    long long variety_count = -1;  ///< -1 when the variety is infinite
    bool variety_condition = false;
    bool pass = false;
    std::string failure;  ///< first failed condition, empty when pass
};

/// Degree-(2n+1) and -(2n+2) moments chosen along the way, when applicable.
struct SolverParameters {
    std::optional<double> p;  ///< beta_{0,2n+1}
    std::optional<double> q;  ///< beta_{2n+1,0}
    std::optional<double> u;  ///< beta_{0,2n+2}
    std::optional<double> v;  ///< beta_{2n+2,0}
    std::optional<double> r;  ///< beta_{0,2n+3} (two-step extensions)
    std::optional<double> s;  ///< beta_{2n+3,0} (two-step extensions)
};

/// The one-step flat-extension obstruction is bilinear-affine in the free top
/// moments (p, q): it vanishes exactly when a + b p + c q + d p q = 0.
struct BilinearForm {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
};

/// Externally imposed values for the free extension moments. Values are in the
/// canonical coordinate frame. Used to select a specific member of a family of
/// representing measures; when absent, deterministic minimal choices are made.
struct ForcedParameters {
    std::optional<double> p, q, u;
};

/// One extension level produced by the solver, with the moment-structure defect
/// of its assembled blocks recorded for later structural assertions.
struct Extension {
    MomentSequence beta;  ///< degree 2(n+1) sequence
    MomentMatrix M;       ///< M(n+1)
    double hankel_defect = 0.0;  ///< max |assembled - rebuilt| entrywise
    double hankel_scale = 1.0;   ///< max |assembled| entrywise
};

struct SolverOutcome {
    SolveStatus status = SolveStatus::no_measure;
    PrecheckReport precheck;
    CaseTag tag;
    int rank = 0;
    std::optional<Extension> first;   ///< extension of M(n)
    std::optional<Extension> second;  ///< extension of M(n+1) on the two-step path
    AtomicMeasure measure;
    SolverParameters params;
    std::optional<BilinearForm> flatness_form;  ///< recovered obstruction (full-rank cases)
    double max_residual = 0.0;  ///< measure moments vs beta, relative
    bool swapped_xy = false;    ///< solved through the coordinate swap (yx = 0 only)
    std::vector<std::string> warnings;
    std::string failure;  ///< reason when status == no_measure
};

/// ---- canonical-frame pipeline ------------------------------------------

/// Necessary conditions on M(n) for a measure supported on the canonical curve.
PrecheckReport run_precheck(const MomentMatrix& M, CanonicalCurve curve,
                            const Tolerances& tol = {});

/// First dependence in the S scan, as a case tag plus the dependence combination.
struct CaseClassification {
    CaseTag tag;
    Poly combo;  ///< dependent column as a combination of the earlier S columns
};
CaseClassification classify_case(const MomentMatrix& M, CanonicalCurve curve,
                                 const Tolerances& tol = {});

/// Unique flat extension of an already-flat M(n) via recursive closure of the
/// degree-n column relations (covers the pure-power cases that force flatness).
Extension extend_recursive_closure(const MomentSequence& beta, const MomentMatrix& M,
                                   CanonicalCurve curve, const Tolerances& tol = {});

/// yx = 1, first dependence at Y^n: Y^n = a_n X^n + p(X) + q(Y) with a_n != 0
/// pins both new columns; the extension is flat in one step.
Extension extend_top_y_dependence(const MomentSequence& beta, const MomentMatrix& M,
                                  const Poly& combo, const Tolerances& tol = {});

struct FullRankResult {
    SolveStatus status = SolveStatus::flat_at_n_plus_1;
    Extension first;
    std::optional<Extension> second;
    SolverParameters params;
    BilinearForm form;
};

/// yx = 1, S is a basis (rank 2n+1): recover the bilinear flatness obstruction
/// in (p, q); if solvable take the minimum-norm root (flat in one step), else
/// extend with the rank-increasing choice and finish one level higher.
FullRankResult extend_full_rank(const MomentSequence& beta, const MomentMatrix& M,
                                const ForcedParameters& forced = {},
                                const Tolerances& tol = {});

/// yx = 0, first dependence at X^k with a pure-X relation and zero constant
/// term; the free top moment is fixed by the policy q := 0.
Extension extend_degenerate_pure_x(const MomentSequence& beta, const MomentMatrix& M,
                                   int k, const Poly& combo, const Tolerances& tol = {});

/// yx = 0, first dependence at Y^k whose relation contains X^k (coefficient
/// a_k != 0); both new columns are recursively determined.
Extension extend_degenerate_pure_y(const MomentSequence& beta, const MomentMatrix& M,
                                   int k, const Poly& combo, const Tolerances& tol = {});

/// yx = 0, S is a basis: the degenerate analogue of the full-rank case, with
/// deterministic policies (p, q) := (0, 0) and u := tau + 1 when not forced.
FullRankResult extend_degenerate_full_rank(const MomentSequence& beta,
                                           const MomentMatrix& M,
                                           const ForcedParameters& forced = {},
                                           const Tolerances& tol = {});

/// Full decision procedure for beta on a canonical curve: precheck, case
/// dispatch, extension, and measure extraction. Never throws NoRepresentingMeasure;
/// a proof of nonexistence is reported through status/failure.
SolverOutcome solve_canonical(const MomentSequence& beta, CanonicalCurve curve,
                              const Tolerances& tol = {},
                              const ForcedParameters& forced = {});

/// ---- general conics ------------------------------------------------------

struct GeneralOutcome {
    ConicClass conic_class = ConicClass::other;
    HyperbolaNormalization normalization;
    SolverOutcome canonical;  ///< outcome in the normalized coordinate frame
    AtomicMeasure measure;    ///< atoms mapped back onto Z(Q)
};

/// Normalize the hyperbola Q, transport beta to the canonical frame, solve
/// there (forced values refer to that frame), and push the measure back.
/// Throws UnsupportedCurve when Q is not a hyperbola.
GeneralOutcome solve(const MomentSequence& beta, const Conic& Q,
                     const Tolerances& tol = {}, const ForcedParameters& forced = {});

/// Minimum-norm real solution of a + b p + c q + d p q = 0; nullopt when none.
std::optional<std::pair<double, double>> solve_bilinear(double a, double b, double c,
                                                        double d);

}  // namespace hypermoment
