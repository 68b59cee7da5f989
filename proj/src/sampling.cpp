#include "hypermoment/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace hypermoment {

namespace {

/// m coordinates over +-[coord_min, coord_max], one per equal slot of the
/// sign-folded domain plus a bounded jitter, so that the separation floor
/// holds by construction and the nodes stay spread out (clustered nodes make
/// the moment matrix needlessly ill-conditioned). On the hyperbola the slots
/// live in log scale, which spreads x and y = 1/x evenly at the same time;
/// on the axes the scale is linear. Throws when m slots cannot respect the
/// separation.
std::vector<double> stratified_coords(std::mt19937_64& rng, const SampleSpec& spec,
                                      int m, bool log_scale) {
    const double lo = log_scale ? std::log(spec.coord_min) : spec.coord_min;
    const double hi = log_scale ? std::log(spec.coord_max) : spec.coord_max;
    const double half = hi - lo;
    const double slot = 2.0 * half / m;
    const double sep = spec.separation + 1e-4;  // margin for the 1e-6 rounding

    // the tightest zero-jitter neighbours sit at the small-|x| end; the two
    // innermost slots across the sign change are 2 * coord_min apart
    if (m >= 2 && 2.0 * spec.coord_min <= sep)
        throw std::invalid_argument("sample: separation exceeds the gap at the axis");
    const double needed = log_scale ? std::log(1.0 + sep / spec.coord_min) : sep;
    if (slot <= needed)
        throw std::invalid_argument("sample: atom count too dense for the separation");
    const double jitter = std::min(0.3, 1.0 - needed / slot);

    std::uniform_real_distribution<double> unit(-0.5, 0.5);
    std::vector<double> out;
    for (int k = 0; k < m; ++k) {
        const double t = (k + 0.5) * slot + jitter * slot * unit(rng);
        double v;
        if (t < half)
            v = log_scale ? -std::exp(hi - t) : -(hi - t);
        else
            v = log_scale ? std::exp(lo + (t - half)) : lo + (t - half);
        out.push_back(std::round(v * 1e6) / 1e6);
    }
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

}  // namespace

AtomicMeasure sample_canonical_measure(const SampleSpec& spec) {
    if (spec.degree < 2 || spec.degree % 2 != 0)
        throw std::invalid_argument("sample: degree must be even and at least 2");
    if (spec.atom_count < 1) throw std::invalid_argument("sample: need at least one atom");
    if (spec.coord_min <= 0 || spec.coord_max <= spec.coord_min ||
        spec.separation <= 0 || spec.density_min <= 0 ||
        spec.density_max < spec.density_min)
        throw std::invalid_argument("sample: inconsistent ranges");
    const int n = spec.degree / 2;

    std::mt19937_64 rng(spec.seed);
    AtomicMeasure mu;
    if (spec.curve == CanonicalCurve::yx_eq_1) {
        for (double x : stratified_coords(rng, spec, spec.atom_count, true))
            mu.atoms.push_back({x, 1.0 / x, 0.0});
    } else {
        if (spec.atom_count > 2 * n + 1)
            throw std::invalid_argument(
                "sample: on yx = 0 the atom count is limited to 2n + 1");
        // branch assignment: n slots per axis plus the origin, shuffled
        std::vector<int> slots;  // 0 = x-axis, 1 = y-axis, 2 = origin
        for (int k = 0; k < n; ++k) {
            slots.push_back(0);
            slots.push_back(1);
        }
        slots.push_back(2);
        std::shuffle(slots.begin(), slots.end(), rng);
        slots.resize(spec.atom_count);
        const int on_x = static_cast<int>(std::count(slots.begin(), slots.end(), 0));
        const int on_y = static_cast<int>(std::count(slots.begin(), slots.end(), 1));
        std::vector<double> xs =
            on_x ? stratified_coords(rng, spec, on_x, false) : std::vector<double>{};
        std::vector<double> ys =
            on_y ? stratified_coords(rng, spec, on_y, false) : std::vector<double>{};
        size_t ix = 0, iy = 0;
        for (int s : slots) {
            if (s == 2)
                mu.atoms.push_back({0.0, 0.0, 0.0});
            else if (s == 0)
                mu.atoms.push_back({xs[ix++], 0.0, 0.0});
            else
                mu.atoms.push_back({0.0, ys[iy++], 0.0});
        }
    }
    std::uniform_real_distribution<double> dens(spec.density_min, spec.density_max);
    for (Atom& a : mu.atoms) a.density = dens(rng);
    return mu;
}

SampledProblem sample_problem(const SampleSpec& spec) {
    SampledProblem out;
    out.measure = sample_canonical_measure(spec);
    out.beta = moments_of(out.measure, spec.degree);
    return out;
}

SampledProblem sample_problem(const SampleSpec& spec, const Conic& Q) {
    HyperbolaNormalization norm = normalize_hyperbola(Q);
    SampleSpec canonical_spec = spec;
    canonical_spec.curve = norm.canonical;
    SampledProblem out;
    out.measure = pushforward_measure(sample_canonical_measure(canonical_spec), norm.phi);
    out.beta = moments_of(out.measure, spec.degree);
    return out;
}

}  // namespace hypermoment
