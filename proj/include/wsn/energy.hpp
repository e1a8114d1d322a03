#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace wsn {

// First-order radio energy model with free-space / multipath amplifier
// switching at the crossover distance d0 = sqrt(eps_fs / eps_mp).
//
// Costs are linear in the bit count; bit counts are doubles because
// aggregated uplink payloads can be fractional after compression.

struct RadioParams {
    double e_elec = 50e-9;        // electronics, J per bit (tx and rx)
    double eps_fs = 10e-12;       // free-space amplifier, J per bit per m^2
    double eps_mp = 0.0013e-12;   // multipath amplifier, J per bit per m^4
    double e_da = 5e-9;           // aggregation cost, J per bit
    std::int64_t ctrl_bits = 100; // size of one control message

    double d0() const { return std::sqrt(eps_fs / eps_mp); }

    friend bool operator==(const RadioParams&, const RadioParams&) = default;

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0))
                throw std::invalid_argument(std::string("radio parameter '") + name +
                                            "' must be positive");
        };
        positive(e_elec, "e_elec");
        positive(eps_fs, "eps_fs");
        positive(eps_mp, "eps_mp");
        positive(e_da, "e_da");
        if (ctrl_bits <= 0)
            throw std::invalid_argument("radio parameter 'ctrl_bits' must be positive");
    }
};

enum class ChargeKind { TxData, RxData, TxCtrl, RxCtrl, Aggregate };

// A single energy debit to be applied to one node's battery.
struct EnergyCharge {
    double joules = 0.0;
    ChargeKind kind = ChargeKind::TxData;
};

inline EnergyCharge tx_cost(const RadioParams& p, double bits, double distance,
                            ChargeKind kind = ChargeKind::TxData) {
    const double amp = distance < p.d0() ? p.eps_fs * distance * distance
                                         : p.eps_mp * distance * distance * distance * distance;
    return {p.e_elec * bits + amp * bits, kind};
}

inline EnergyCharge rx_cost(const RadioParams& p, double bits,
                            ChargeKind kind = ChargeKind::RxData) {
    return {p.e_elec * bits, kind};
}

inline EnergyCharge agg_cost(const RadioParams& p, double bits) {
    return {p.e_da * bits, ChargeKind::Aggregate};
}

struct DebitResult {
    double energy; // remaining battery, clamped at zero
    bool died;     // true when the charge met or exceeded the battery
};

// Batteries never go negative: a node that cannot cover a charge in full
// spends what it has and dies.
inline DebitResult debit(double energy, const EnergyCharge& charge) {
    if (charge.joules >= energy)
        return {0.0, true};
    return {energy - charge.joules, false};
}

} // namespace wsn
