#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Mamdani fuzzy inference, specialized to the two-input system that maps a
// node's normalized base-station distance and normalized residual energy to a
// cluster-competition radius. Operators are the classical min/max family:
// AND = min, implication clips the consequent, aggregation = max, and the
// crisp output is the centroid of the aggregated shape.

namespace wsn {

class MembershipFunction {
public:
    static MembershipFunction triangular(double a, double b, double c) {
        if (!(a <= b && b <= c))
            throw std::invalid_argument("triangular breakpoints must satisfy a <= b <= c");
        return MembershipFunction(a, b, b, c, true);
    }

    static MembershipFunction trapezoidal(double a, double b, double c, double d) {
        if (!(a <= b && b <= c && c <= d))
            throw std::invalid_argument("trapezoidal breakpoints must satisfy a <= b <= c <= d");
        return MembershipFunction(a, b, c, d, false);
    }

    // Piecewise-linear degree in [0, 1]. Exact at the breakpoints: the
    // shoulders evaluate to 0, the plateau (or triangle peak) to 1.
    double degree(double x) const {
        if (x < a_ || x > d_)
            return 0.0;
        if (x < b_)
            return (x - a_) / (b_ - a_); // a_ < b_ here, since x >= a_
        if (x > c_)
            return (d_ - x) / (d_ - c_);
        return 1.0;
    }

    bool is_triangular() const { return tri_; }
    double left() const { return a_; }
    double right() const { return d_; }

    // The defining breakpoints: 3 values for a triangle, 4 for a trapezoid.
    std::vector<double> breakpoints() const {
        if (tri_)
            return {a_, b_, d_};
        return {a_, b_, c_, d_};
    }

    friend bool operator==(const MembershipFunction& l, const MembershipFunction& r) {
        return l.a_ == r.a_ && l.b_ == r.b_ && l.c_ == r.c_ && l.d_ == r.d_ && l.tri_ == r.tri_;
    }

private:
    MembershipFunction(double a, double b, double c, double d, bool tri)
        : a_(a), b_(b), c_(c), d_(d), tri_(tri) {}

    // Trapezoid corners; a triangle is stored with b_ == c_.
    double a_, b_, c_, d_;
    bool tri_;
};

struct Term {
    std::string label;
    MembershipFunction mf;
};

using DegreeMap = std::map<std::string, double, std::less<>>;

class LinguisticVariable {
public:
    LinguisticVariable(std::string name, double lo, double hi, std::vector<Term> terms)
        : name_(std::move(name)), lo_(lo), hi_(hi), terms_(std::move(terms)) {
        if (!(lo_ < hi_))
            throw std::invalid_argument("variable '" + name_ + "': universe is empty");
        if (terms_.empty())
            throw std::invalid_argument("variable '" + name_ + "': no terms");
        for (const Term& t : terms_) {
            if (t.mf.left() < lo_ || t.mf.right() > hi_)
                throw std::invalid_argument("variable '" + name_ + "', term '" + t.label +
                                            "': breakpoints leave the universe [" +
                                            std::to_string(lo_) + ", " + std::to_string(hi_) + "]");
        }
        check_coverage();
    }

    const std::string& name() const { return name_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    std::span<const Term> terms() const { return terms_; }

    const Term* find(std::string_view label) const {
        for (const Term& t : terms_)
            if (t.label == label)
                return &t;
        return nullptr;
    }

    int index_of(std::string_view label) const {
        for (std::size_t i = 0; i < terms_.size(); ++i)
            if (terms_[i].label == label)
                return static_cast<int>(i);
        return -1;
    }

    double clamp(double x) const { return std::min(std::max(x, lo_), hi_); }

    // Degree of every term at x (x clamped to the universe first).
    DegreeMap fuzzify(double x) const {
        x = clamp(x);
        DegreeMap out;
        for (const Term& t : terms_)
            out.emplace(t.label, t.mf.degree(x));
        return out;
    }

private:
    // Every point of the universe must activate some term, otherwise inputs
    // in the gap would produce an empty aggregate downstream. For
    // piecewise-linear shapes it is enough to check positivity of the best
    // degree at the universe ends and at every breakpoint: between two
    // adjacent checkpoints all degrees are linear and can only reach zero at
    // a support edge, which is itself a checkpoint.
    void check_coverage() const {
        std::vector<double> pts{lo_, hi_};
        for (const Term& t : terms_)
            for (double b : t.mf.breakpoints())
                pts.push_back(b);
        std::sort(pts.begin(), pts.end());
        for (double p : pts) {
            double best = 0.0;
            for (const Term& t : terms_)
                best = std::max(best, t.mf.degree(p));
            if (!(best > 0.0))
                throw std::invalid_argument("variable '" + name_ + "': no term covers x = " +
                                            std::to_string(p));
        }
    }

    std::string name_;
    double lo_, hi_;
    std::vector<Term> terms_;
};

struct FuzzyRule {
    std::string distance_term;
    std::string energy_term;
    std::string radius_term;

    friend bool operator==(const FuzzyRule&, const FuzzyRule&) = default;
};

// Complete rule table for the two-input system: one rule per antecedent pair,
// each pair appearing exactly once.
class RuleBase {
public:
    RuleBase(std::vector<FuzzyRule> rules, const LinguisticVariable& distance,
             const LinguisticVariable& energy, const LinguisticVariable& radius)
        : rules_(std::move(rules)) {
        const std::size_t want = distance.terms().size() * energy.terms().size();
        if (rules_.size() != want)
            throw std::invalid_argument("rule table must contain exactly " +
                                        std::to_string(want) + " rules, got " +
                                        std::to_string(rules_.size()));
        std::vector<std::pair<int, int>> seen;
        for (const FuzzyRule& r : rules_) {
            const int di = distance.index_of(r.distance_term);
            const int ei = energy.index_of(r.energy_term);
            const int oi = radius.index_of(r.radius_term);
            if (di < 0)
                throw std::invalid_argument("rule names unknown distance term '" +
                                            r.distance_term + "'");
            if (ei < 0)
                throw std::invalid_argument("rule names unknown energy term '" + r.energy_term +
                                            "'");
            if (oi < 0)
                throw std::invalid_argument("rule names unknown radius term '" + r.radius_term +
                                            "'");
            const std::pair<int, int> key{di, ei};
            if (std::find(seen.begin(), seen.end(), key) != seen.end())
                throw std::invalid_argument("duplicate rule for antecedent (" + r.distance_term +
                                            ", " + r.energy_term + ")");
            seen.push_back(key);
        }
    }

    std::span<const FuzzyRule> rules() const { return rules_; }

private:
    std::vector<FuzzyRule> rules_;
};

// Output of the implication/aggregation stage: every output term together
// with its clip level (zero when no rule fired for it), in term order.
struct AggregatedOutput {
    struct Clipped {
        MembershipFunction mf;
        double clip;
    };
    std::vector<Clipped> terms;
    double lo = 0.0, hi = 1.0;

    double degree_at(double x) const {
        double mu = 0.0;
        for (const Clipped& c : terms)
            if (c.clip > 0.0)
                mu = std::max(mu, std::min(c.clip, c.mf.degree(x)));
        return mu;
    }

    bool empty() const {
        for (const Clipped& c : terms)
            if (c.clip > 0.0)
                return false;
        return true;
    }
};

struct EmptyAggregate : std::runtime_error {
    EmptyAggregate() : std::runtime_error("no rule fired: aggregated output has zero area") {}
};

namespace detail {

// Index range [first, last) of the cells whose midpoints can fall inside the
// support [sx, ex], padded by one cell and aligned down to a multiple of four.
// Samples outside a support contribute an exact +0.0 to every accumulator, so
// both the alignment slack and skipping the rest of the universe leave the
// sums bit-identical to a full sweep as long as the lane phase (i mod 4) is
// preserved, which the alignment guarantees.
inline std::pair<std::int64_t, std::int64_t> support_cells(double lo, double h, std::int64_t n,
                                                           double sx, double ex) {
    auto first = static_cast<std::int64_t>((sx - lo) / h) - 1;
    auto last = static_cast<std::int64_t>((ex - lo) / h) + 2;
    first = std::max<std::int64_t>(first, 0);
    last = std::min(last, n);
    first -= first % 4;
    if (last < first)
        last = first;
    return {first, last};
}

// Shared centroid accumulation: Σ x·mu and Σ mu over the cell midpoints
// x = lo + (i + 0.5)·h for i in [first, last), with `first` a multiple of
// four. Four independent partial sums per series keep the floating-point adds
// off the critical path; the fixed lane assignment and combine order make the
// result identical for every caller that supplies elementwise-equal mu
// values, which is what keeps the cached-table engine path and the composed
// pipeline bit-for-bit interchangeable.
template <class MuAt>
inline std::pair<double, double> centroid_sums(double lo, double h, std::int64_t first,
                                               std::int64_t last, MuAt&& mu_at) {
    double num0 = 0.0, num1 = 0.0, num2 = 0.0, num3 = 0.0;
    double den0 = 0.0, den1 = 0.0, den2 = 0.0, den3 = 0.0;
    std::int64_t i = first;
    for (; i + 4 <= last; i += 4) {
        const double x0 = lo + (static_cast<double>(i) + 0.5) * h;
        const double x1 = lo + (static_cast<double>(i + 1) + 0.5) * h;
        const double x2 = lo + (static_cast<double>(i + 2) + 0.5) * h;
        const double x3 = lo + (static_cast<double>(i + 3) + 0.5) * h;
        const double m0 = mu_at(i, x0);
        const double m1 = mu_at(i + 1, x1);
        const double m2 = mu_at(i + 2, x2);
        const double m3 = mu_at(i + 3, x3);
        num0 += x0 * m0;
        num1 += x1 * m1;
        num2 += x2 * m2;
        num3 += x3 * m3;
        den0 += m0;
        den1 += m1;
        den2 += m2;
        den3 += m3;
    }
    for (; i < last; ++i) {
        const double x = lo + (static_cast<double>(i) + 0.5) * h;
        const double m = mu_at(i, x);
        num0 += x * m;
        den0 += m;
    }
    return {(num0 + num1) + (num2 + num3), (den0 + den1) + (den2 + den3)};
}

} // namespace detail

// Mamdani inference: each rule fires at min(degree of its two antecedents)
// and clips its consequent term; clips for the same term aggregate by max.
inline AggregatedOutput infer(const RuleBase& rules, const DegreeMap& distance_degrees,
                              const DegreeMap& energy_degrees,
                              const LinguisticVariable& radius) {
    std::vector<double> clip(radius.terms().size(), 0.0);
    for (const FuzzyRule& r : rules.rules()) {
        const auto d = distance_degrees.find(r.distance_term);
        const auto e = energy_degrees.find(r.energy_term);
        if (d == distance_degrees.end() || e == energy_degrees.end())
            throw std::invalid_argument("rule references a term missing from the degree map");
        const double fire = std::min(d->second, e->second);
        const int oi = radius.index_of(r.radius_term);
        clip[static_cast<std::size_t>(oi)] =
            std::max(clip[static_cast<std::size_t>(oi)], fire);
    }
    AggregatedOutput out;
    out.lo = radius.lo();
    out.hi = radius.hi();
    for (std::size_t i = 0; i < clip.size(); ++i)
        out.terms.push_back({radius.terms()[i].mf, clip[i]});
    return out;
}

// Centroid defuzzification by midpoint discretization: the universe is split
// into `resolution` equal cells and the aggregate is sampled at each cell
// midpoint. The cell width cancels in the ratio.
inline double defuzzify_centroid(const AggregatedOutput& agg, std::int64_t resolution) {
    if (resolution < 1)
        throw std::invalid_argument("defuzzification resolution must be >= 1");
    if (agg.empty())
        throw EmptyAggregate();
    const double h = (agg.hi - agg.lo) / static_cast<double>(resolution);
    double sx = agg.hi, ex = agg.lo;
    for (const AggregatedOutput::Clipped& c : agg.terms) {
        if (c.clip > 0.0) {
            sx = std::min(sx, c.mf.left());
            ex = std::max(ex, c.mf.right());
        }
    }
    const auto [first, last] = detail::support_cells(agg.lo, h, resolution, sx, ex);
    const auto [num, den] = detail::centroid_sums(
        agg.lo, h, first, last, [&](std::int64_t, double x) { return agg.degree_at(x); });
    if (!(den > 0.0))
        throw EmptyAggregate();
    return num / den;
}

// Membership breakpoints and the rule table, as plain data so that a config
// file can override any of it. The defaults below are the shipped system.
struct FuzzySystemSpec {
    MembershipFunction distance_close = MembershipFunction::trapezoidal(0.0, 0.0, 0.2, 0.4);
    MembershipFunction distance_medium = MembershipFunction::triangular(0.2, 0.5, 0.8);
    MembershipFunction distance_far = MembershipFunction::trapezoidal(0.6, 0.8, 1.0, 1.0);

    MembershipFunction energy_low = MembershipFunction::trapezoidal(0.0, 0.0, 0.2, 0.4);
    MembershipFunction energy_medium = MembershipFunction::triangular(0.2, 0.5, 0.8);
    MembershipFunction energy_high = MembershipFunction::trapezoidal(0.6, 0.8, 1.0, 1.0);

    MembershipFunction radius_very_small = MembershipFunction::trapezoidal(0.0, 0.0, 0.1, 0.25);
    MembershipFunction radius_small = MembershipFunction::triangular(0.1, 0.3, 0.5);
    MembershipFunction radius_medium = MembershipFunction::triangular(0.3, 0.5, 0.7);
    MembershipFunction radius_large = MembershipFunction::triangular(0.5, 0.7, 0.9);
    MembershipFunction radius_very_large = MembershipFunction::trapezoidal(0.75, 0.9, 1.0, 1.0);

    std::vector<FuzzyRule> rules = default_rules();

    static std::vector<FuzzyRule> default_rules() {
        return {
            {"close", "low", "very_small"},   {"close", "medium", "small"},
            {"close", "high", "small"},       {"medium", "low", "small"},
            {"medium", "medium", "medium"},   {"medium", "high", "large"},
            {"far", "low", "large"},          {"far", "medium", "large"},
            {"far", "high", "very_large"},
        };
    }

    friend bool operator==(const FuzzySystemSpec&, const FuzzySystemSpec&) = default;
};

inline constexpr std::int64_t kDefaultResolution = 10000;

// The assembled inference engine. Construction validates the variables, the
// rule table, and full input coverage, and precomputes per-term degree tables
// over the output universe so the per-call defuzzification loop only does
// min/max against cached samples. Immutable afterwards, so a single engine is
// safe to share across concurrently running trials.
class FuzzyEngine {
public:
    explicit FuzzyEngine(const FuzzySystemSpec& spec = FuzzySystemSpec{},
                         std::int64_t resolution = kDefaultResolution)
        : distance_("distance", 0.0, 1.0,
                    {{"close", spec.distance_close},
                     {"medium", spec.distance_medium},
                     {"far", spec.distance_far}}),
          energy_("energy", 0.0, 1.0,
                  {{"low", spec.energy_low},
                   {"medium", spec.energy_medium},
                   {"high", spec.energy_high}}),
          radius_("radius", 0.0, 1.0,
                  {{"very_small", spec.radius_very_small},
                   {"small", spec.radius_small},
                   {"medium", spec.radius_medium},
                   {"large", spec.radius_large},
                   {"very_large", spec.radius_very_large}}),
          rules_(spec.rules, distance_, energy_, radius_),
          resolution_(resolution) {
        if (resolution_ < 1)
            throw std::invalid_argument("defuzzification resolution must be >= 1");
        for (std::size_t r = 0; r < spec.rules.size(); ++r) {
            rule_distance_[r] = distance_.index_of(spec.rules[r].distance_term);
            rule_energy_[r] = energy_.index_of(spec.rules[r].energy_term);
            rule_radius_[r] = radius_.index_of(spec.rules[r].radius_term);
        }
        // Degree of each output term at every cell midpoint, laid out term
        // after term. Sampling uses the same expression as
        // defuzzify_centroid, which keeps the two paths bit-identical.
        const double h = (radius_.hi() - radius_.lo()) / static_cast<double>(resolution_);
        tables_.resize(radius_.terms().size() * static_cast<std::size_t>(resolution_));
        for (std::size_t t = 0; t < radius_.terms().size(); ++t) {
            double* row = tables_.data() + t * static_cast<std::size_t>(resolution_);
            for (std::int64_t i = 0; i < resolution_; ++i) {
                const double x = radius_.lo() + (static_cast<double>(i) + 0.5) * h;
                row[i] = radius_.terms()[t].mf.degree(x);
            }
        }
    }

    const LinguisticVariable& distance() const { return distance_; }
    const LinguisticVariable& energy() const { return energy_; }
    const LinguisticVariable& radius() const { return radius_; }
    const RuleBase& rules() const { return rules_; }
    std::int64_t resolution() const { return resolution_; }

    // Crisp competition radius in (0, r_max]. Inputs are clamped to [0, 1].
    // Equals r_max times the centroid of the aggregated output, and matches
    // the composed fuzzify/infer/defuzzify_centroid pipeline bit for bit.
    double compute_radius(double d_norm, double e_norm, double r_max) const {
        const double d = distance_.clamp(d_norm);
        const double e = energy_.clamp(e_norm);

        std::array<double, 3> dd{}, ee{};
        for (std::size_t i = 0; i < 3; ++i) {
            dd[i] = distance_.terms()[i].mf.degree(d);
            ee[i] = energy_.terms()[i].mf.degree(e);
        }

        std::array<double, 5> clip{};
        for (std::size_t r = 0; r < rule_distance_.size(); ++r) {
            const double fire = std::min(dd[static_cast<std::size_t>(rule_distance_[r])],
                                         ee[static_cast<std::size_t>(rule_energy_[r])]);
            double& c = clip[static_cast<std::size_t>(rule_radius_[r])];
            c = std::max(c, fire);
        }

        int active[5];
        int n_active = 0;
        for (int t = 0; t < 5; ++t)
            if (clip[static_cast<std::size_t>(t)] > 0.0)
                active[n_active++] = t;
        if (n_active == 0)
            throw EmptyAggregate();

        const double lo = radius_.lo();
        const double h = (radius_.hi() - lo) / static_cast<double>(resolution_);
        double sx = radius_.hi(), ex = lo;
        for (int k = 0; k < n_active; ++k) {
            const MembershipFunction& mf = radius_.terms()[static_cast<std::size_t>(active[k])].mf;
            sx = std::min(sx, mf.left());
            ex = std::max(ex, mf.right());
        }
        const auto [first, last] = detail::support_cells(lo, h, resolution_, sx, ex);
        const double* base = tables_.data();
        const auto res = static_cast<std::size_t>(resolution_);
        const auto [num, den] =
            detail::centroid_sums(lo, h, first, last, [&](std::int64_t i, double) {
                double mu = 0.0;
                for (int k = 0; k < n_active; ++k) {
                    const int t = active[k];
                    const double d_t = base[static_cast<std::size_t>(t) * res +
                                            static_cast<std::size_t>(i)];
                    mu = std::max(mu, std::min(clip[static_cast<std::size_t>(t)], d_t));
                }
                return mu;
            });
        return r_max * (num / den);
    }

private:
    LinguisticVariable distance_;
    LinguisticVariable energy_;
    LinguisticVariable radius_;
    RuleBase rules_;
    std::int64_t resolution_;
    std::array<int, 9> rule_distance_{}, rule_energy_{}, rule_radius_{};
    std::vector<double> tables_;
};

} // namespace wsn
