#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wsn/energy.hpp"
#include "wsn/rng.hpp"

using namespace wsn;

TEST_CASE("transmit cost uses the free-space amplifier below the crossover") {
    const RadioParams p;
    CHECK(tx_cost(p, 4000, 50.0).joules == Catch::Approx(3.0e-4).epsilon(1e-12));
}

TEST_CASE("transmit cost switches to the multipath amplifier past the crossover") {
    const RadioParams p;
    CHECK(tx_cost(p, 4000, 100.0).joules == Catch::Approx(7.2e-4).epsilon(1e-12));
}

TEST_CASE("receive and aggregate costs are linear electronics charges") {
    const RadioParams p;
    CHECK(rx_cost(p, 4000).joules == Catch::Approx(2.0e-4).epsilon(1e-12));
    CHECK(agg_cost(p, 40000).joules == Catch::Approx(2.0e-4).epsilon(1e-12));
}

TEST_CASE("the amplifier crossover sits near 87.7 m and the cost is continuous there") {
    const RadioParams p;
    const double d0 = p.d0();
    CHECK(d0 == Catch::Approx(87.7058).margin(1e-3));
    const double below = tx_cost(p, 1000, std::nextafter(d0, 0.0)).joules;
    const double at = tx_cost(p, 1000, d0).joules;
    CHECK(below == Catch::Approx(at).epsilon(1e-9));
}

TEST_CASE("costs are exactly linear in the bit count") {
    const RadioParams p;
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const double bits = 1.0 + 9999.0 * rng.next_unit();
        const double d = 200.0 * rng.next_unit();
        CHECK(tx_cost(p, 2.0 * bits, d).joules == 2.0 * tx_cost(p, bits, d).joules);
        CHECK(rx_cost(p, 2.0 * bits).joules == 2.0 * rx_cost(p, bits).joules);
        CHECK(agg_cost(p, 2.0 * bits).joules == 2.0 * agg_cost(p, bits).joules);
    }
}

TEST_CASE("transmit cost never decreases with distance") {
    const RadioParams p;
    Rng rng(17);
    for (int i = 0; i < 500; ++i) {
        const double a = 300.0 * rng.next_unit();
        const double b = 300.0 * rng.next_unit();
        const double lo = std::min(a, b), hi = std::max(a, b);
        CHECK(tx_cost(p, 4000, hi).joules >= tx_cost(p, 4000, lo).joules);
    }
}

TEST_CASE("control messages cost the same formula at their own bit size") {
    const RadioParams p;
    const EnergyCharge c = tx_cost(p, static_cast<double>(p.ctrl_bits), 25.0,
                                   ChargeKind::TxCtrl);
    CHECK(c.kind == ChargeKind::TxCtrl);
    CHECK(c.joules == Catch::Approx(p.e_elec * 100 + p.eps_fs * 100 * 625.0));
}

TEST_CASE("debit subtracts a covered charge without death") {
    const DebitResult r = debit(1.0, {0.3, ChargeKind::TxData});
    CHECK(r.energy == Catch::Approx(0.7));
    CHECK_FALSE(r.died);
}

TEST_CASE("debit clamps an uncovered charge at zero and reports death") {
    const DebitResult r = debit(0.2, {0.3, ChargeKind::TxData});
    CHECK(r.energy == 0.0);
    CHECK(r.died);
}

TEST_CASE("a charge equal to the battery is fatal") {
    const DebitResult r = debit(0.25, {0.25, ChargeKind::RxData});
    CHECK(r.energy == 0.0);
    CHECK(r.died);
}

TEST_CASE("non-positive radio parameters are rejected") {
    RadioParams p;
    p.eps_mp = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = RadioParams{};
    p.ctrl_bits = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    CHECK_NOTHROW(RadioParams{}.validate());
}
