#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "wsn/fuzzy.hpp"
#include "wsn/rng.hpp"

using namespace wsn;

namespace {

// Independent check for the centroid: a left-endpoint Riemann sum at a much
// finer resolution, sharing no code with defuzzify_centroid's midpoint loop.
double riemann_centroid(const AggregatedOutput& agg, std::int64_t n) {
    const double h = (agg.hi - agg.lo) / static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double x = agg.lo + static_cast<double>(i) * h;
        const double mu = agg.degree_at(x);
        num += x * mu;
        den += mu;
    }
    return num / den;
}

AggregatedOutput single_term_aggregate(const MembershipFunction& mf, double clip) {
    AggregatedOutput agg;
    agg.lo = 0.0;
    agg.hi = 1.0;
    agg.terms.push_back({mf, clip});
    return agg;
}

// Exact centroids of the two shoulder output terms at full clip, from the
// closed-form moment integrals of the trapezoids.
constexpr double kVeryLargeCentroid = 127.0 / 140.0; // 0.90714...
constexpr double kVerySmallCentroid = 13.0 / 140.0;  // 0.09285...

} // namespace

TEST_CASE("triangular membership interpolates linearly between breakpoints") {
    const auto mf = MembershipFunction::triangular(0.2, 0.5, 0.8);
    CHECK(mf.degree(0.5) == 1.0);
    CHECK(mf.degree(0.35) == Catch::Approx(0.5));
    CHECK(mf.degree(0.2) == 0.0);
    CHECK(mf.degree(0.8) == 0.0);
    CHECK(mf.degree(0.0) == 0.0);
    CHECK(mf.degree(1.0) == 0.0);
    CHECK(mf.degree(0.65) == Catch::Approx(0.5));
}

TEST_CASE("trapezoidal membership holds its plateau at one") {
    const auto low = MembershipFunction::trapezoidal(0.0, 0.0, 0.2, 0.4);
    CHECK(low.degree(0.0) == 1.0);
    CHECK(low.degree(0.1) == 1.0);
    CHECK(low.degree(0.2) == 1.0);
    CHECK(low.degree(0.3) == Catch::Approx(0.5));
    CHECK(low.degree(0.4) == 0.0);

    const auto high = MembershipFunction::trapezoidal(0.6, 0.8, 1.0, 1.0);
    CHECK(high.degree(1.0) == 1.0);
    CHECK(high.degree(0.8) == 1.0);
    CHECK(high.degree(0.7) == Catch::Approx(0.5));
    CHECK(high.degree(0.6) == 0.0);
}

TEST_CASE("membership breakpoints must be ordered") {
    CHECK_THROWS_AS(MembershipFunction::triangular(0.5, 0.2, 0.8), std::invalid_argument);
    CHECK_THROWS_AS(MembershipFunction::trapezoidal(0.0, 0.5, 0.4, 1.0),
                    std::invalid_argument);
    CHECK_NOTHROW(MembershipFunction::triangular(0.5, 0.5, 0.5));
}

TEST_CASE("fuzzify reports every term's degree") {
    const FuzzyEngine engine;
    const DegreeMap d = engine.distance().fuzzify(0.3);
    REQUIRE(d.size() == 3);
    CHECK(d.at("close") == Catch::Approx(0.5));
    CHECK(d.at("medium") == Catch::Approx(1.0 / 3.0));
    CHECK(d.at("far") == 0.0);
}

TEST_CASE("fuzzify clamps inputs to the universe") {
    const FuzzyEngine engine;
    CHECK(engine.distance().fuzzify(-0.2) == engine.distance().fuzzify(0.0));
    CHECK(engine.energy().fuzzify(1.7) == engine.energy().fuzzify(1.0));
}

TEST_CASE("every point of a variable's universe activates some term") {
    const FuzzyEngine engine;
    Rng rng(7);
    for (int i = 0; i < 2000; ++i) {
        const double x = rng.next_unit();
        double best = 0.0;
        for (const auto& [label, deg] : engine.distance().fuzzify(x))
            best = std::max(best, deg);
        CHECK(best > 0.0);
    }
}

TEST_CASE("a variable with a coverage gap is rejected") {
    const std::vector<Term> gappy{
        {"lo", MembershipFunction::trapezoidal(0.0, 0.0, 0.1, 0.2)},
        {"hi", MembershipFunction::trapezoidal(0.5, 0.6, 1.0, 1.0)},
    };
    CHECK_THROWS_AS(LinguisticVariable("gappy", 0.0, 1.0, gappy), std::invalid_argument);
}

TEST_CASE("breakpoints outside the universe are rejected") {
    const std::vector<Term> outside{
        {"t", MembershipFunction::trapezoidal(-0.1, 0.0, 1.0, 1.1)},
    };
    CHECK_THROWS_AS(LinguisticVariable("outside", 0.0, 1.0, outside), std::invalid_argument);
}

TEST_CASE("inference clips each fired consequent and keeps the max per term") {
    const FuzzyEngine engine;
    const DegreeMap d = engine.distance().fuzzify(0.3); // close 0.5, medium 1/3
    const DegreeMap e = engine.energy().fuzzify(0.1);   // low 1
    const AggregatedOutput agg = infer(engine.rules(), d, e, engine.radius());
    REQUIRE(agg.terms.size() == 5);
    CHECK(agg.terms[0].clip == Catch::Approx(0.5));       // very_small via (close, low)
    CHECK(agg.terms[1].clip == Catch::Approx(1.0 / 3.0)); // small via (medium, low)
    CHECK(agg.terms[2].clip == 0.0);
    CHECK(agg.terms[3].clip == 0.0);
    CHECK(agg.terms[4].clip == 0.0);
}

TEST_CASE("in-universe inputs always fire at least one rule") {
    const FuzzyEngine engine;
    Rng rng(11);
    for (int i = 0; i < 500; ++i) {
        const DegreeMap d = engine.distance().fuzzify(rng.next_unit());
        const DegreeMap e = engine.energy().fuzzify(rng.next_unit());
        const AggregatedOutput agg = infer(engine.rules(), d, e, engine.radius());
        CHECK_FALSE(agg.empty());
    }
}

TEST_CASE("centroid of the full very_large term matches the closed form") {
    const auto agg = single_term_aggregate(
        MembershipFunction::trapezoidal(0.75, 0.9, 1.0, 1.0), 1.0);
    CHECK(defuzzify_centroid(agg, 10000) == Catch::Approx(kVeryLargeCentroid).margin(1e-4));
}

TEST_CASE("centroid of the full very_small term matches the closed form") {
    const auto agg = single_term_aggregate(
        MembershipFunction::trapezoidal(0.0, 0.0, 0.1, 0.25), 1.0);
    CHECK(defuzzify_centroid(agg, 10000) == Catch::Approx(kVerySmallCentroid).margin(1e-4));
}

TEST_CASE("defuzzification rejects an aggregate no rule touched") {
    AggregatedOutput agg;
    agg.lo = 0.0;
    agg.hi = 1.0;
    agg.terms.push_back({MembershipFunction::triangular(0.1, 0.3, 0.5), 0.0});
    CHECK_THROWS_AS(defuzzify_centroid(agg, 10000), EmptyAggregate);
}

TEST_CASE("midpoint defuzzification agrees with a fine Riemann oracle") {
    const FuzzyEngine engine;
    Rng rng(202);
    for (int i = 0; i < 50; ++i) {
        AggregatedOutput agg;
        agg.lo = 0.0;
        agg.hi = 1.0;
        bool any = false;
        for (const Term& t : engine.radius().terms()) {
            const double clip = rng.next_unit() < 0.3 ? 0.0 : rng.next_unit();
            any = any || clip > 0.0;
            agg.terms.push_back({t.mf, clip});
        }
        if (!any)
            agg.terms[0].clip = 0.5;
        const double fast = defuzzify_centroid(agg, 10000);
        const double slow = riemann_centroid(agg, 1000000);
        CHECK(fast == Catch::Approx(slow).margin(1e-3));
    }
}

TEST_CASE("radius at full battery and maximum distance hits the top centroid") {
    const FuzzyEngine engine;
    CHECK(engine.compute_radius(1.0, 1.0, 25.0) ==
          Catch::Approx(25.0 * kVeryLargeCentroid).margin(0.005));
}

TEST_CASE("radius at empty battery next to the base station hits the bottom centroid") {
    const FuzzyEngine engine;
    CHECK(engine.compute_radius(0.0, 0.0, 25.0) ==
          Catch::Approx(25.0 * kVerySmallCentroid).margin(0.005));
}

TEST_CASE("compute_radius clamps out-of-range inputs") {
    const FuzzyEngine engine;
    CHECK(engine.compute_radius(-3.0, 2.0, 25.0) == engine.compute_radius(0.0, 1.0, 25.0));
}

TEST_CASE("compute_radius scales linearly with r_max") {
    const FuzzyEngine engine;
    Rng rng(31);
    for (int i = 0; i < 100; ++i) {
        const double d = rng.next_unit();
        const double e = rng.next_unit();
        const double r = 1.0 + 99.0 * rng.next_unit();
        CHECK(engine.compute_radius(d, e, r) == r * engine.compute_radius(d, e, 1.0));
    }
}

TEST_CASE("compute_radius stays inside (0, r_max]") {
    const FuzzyEngine engine;
    Rng rng(47);
    for (int i = 0; i < 500; ++i) {
        const double r = engine.compute_radius(rng.next_unit(), rng.next_unit(), 25.0);
        CHECK(r > 0.0);
        CHECK(r <= 25.0);
    }
}

TEST_CASE("the cached engine path equals the composed pipeline bit for bit") {
    const FuzzyEngine engine;
    Rng rng(59);
    for (int i = 0; i < 200; ++i) {
        const double d = rng.next_unit();
        const double e = rng.next_unit();
        const AggregatedOutput agg = infer(engine.rules(), engine.distance().fuzzify(d),
                                           engine.energy().fuzzify(e), engine.radius());
        const double composed = defuzzify_centroid(agg, engine.resolution());
        CHECK(engine.compute_radius(d, e, 1.0) == composed);
    }
}

// The default system is NOT globally monotone: min/max clipping followed by a
// centroid lets a rising antecedent pump mass into a low output term (e.g.
// (close, high) -> small firing harder as energy climbs through [0.6, 0.8]),
// which drags the crisp radius down a little. Verified analytically: at
// d = 0.25 the e-step 0.70 -> 0.75 moves the centroid 0.41795 -> 0.40055,
// a 0.435 m dip at r_max = 25. This test pins the actual shape of the grid:
// corner extremes, dips both rare and small.
TEST_CASE("radius grid: extreme corners, rare bounded dips elsewhere") {
    const FuzzyEngine engine;
    const int n = 21;
    std::vector<std::vector<double>> r(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            r[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                engine.compute_radius(i / 20.0, j / 20.0, 25.0);

    const double noise = 1e-9;   // fp slack: a genuine step is never this small
    const double max_dip = 0.5;  // meters; the worst analytic dip is 0.435
    int dips = 0;
    int steps = 0;
    auto step = [&](double from, double to) {
        ++steps;
        CHECK(to >= from - max_dip);
        if (to < from - noise)
            ++dips;
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j + 1 < n; ++j)
            step(r[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                 r[static_cast<std::size_t>(i)][static_cast<std::size_t>(j + 1)]);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i + 1 < n; ++i)
            step(r[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                 r[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(j)]);

    CHECK(steps == 840);
    CHECK(dips == 12); // the known dip bands; a change here means the system changed

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            CHECK(r[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] <=
                  r[20][20] + noise);
            CHECK(r[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] >=
                  r[0][0] - noise);
        }
}

TEST_CASE("identical inputs give bit-identical radii") {
    const FuzzyEngine a;
    const FuzzyEngine b;
    Rng rng(73);
    for (int i = 0; i < 100; ++i) {
        const double d = rng.next_unit();
        const double e = rng.next_unit();
        CHECK(a.compute_radius(d, e, 25.0) == b.compute_radius(d, e, 25.0));
    }
}

TEST_CASE("the rule base requires all nine antecedent pairs exactly once") {
    const FuzzyEngine engine;

    SECTION("a duplicated antecedent pair is rejected") {
        auto rules = FuzzySystemSpec::default_rules();
        rules[2] = rules[1]; // (close, medium) twice, (close, high) gone
        CHECK_THROWS_AS(RuleBase(rules, engine.distance(), engine.energy(), engine.radius()),
                        std::invalid_argument);
    }

    SECTION("a short table is rejected") {
        auto rules = FuzzySystemSpec::default_rules();
        rules.pop_back();
        CHECK_THROWS_AS(RuleBase(rules, engine.distance(), engine.energy(), engine.radius()),
                        std::invalid_argument);
    }

    SECTION("an unknown term label is rejected") {
        auto rules = FuzzySystemSpec::default_rules();
        rules[0].radius_term = "enormous";
        CHECK_THROWS_AS(RuleBase(rules, engine.distance(), engine.energy(), engine.radius()),
                        std::invalid_argument);
    }

    SECTION("the shipped table is accepted") {
        CHECK_NOTHROW(RuleBase(FuzzySystemSpec::default_rules(), engine.distance(),
                               engine.energy(), engine.radius()));
    }
}
