#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "wsn/energy.hpp"
#include "wsn/fuzzy.hpp"
#include "wsn/network.hpp"
#include "wsn/rng.hpp"

// Round-based clustering protocols over a Network. Two schemes share the
// cluster-formation and steady-state machinery:
//
//   LEACH: pure rotation. Each round every alive node draws against a
//   threshold that guarantees exactly one head term per node per epoch of
//   floor(1/p) rounds.
//
//   FCA: energy-and-distance-aware competition. Nodes volunteer with
//   probability t, get a fuzzy competition radius, and a tentative head
//   withdraws when a stronger tentative (more residual energy, ties to the
//   lower id) sits within either radius.
//
// Everything iterates in ascending node id so a seed reproduces a trial
// bit for bit.

namespace wsn {

enum class Protocol { Leach, Fca };

// ---------------------------------------------------------------------------
// LEACH

struct LeachState {
    double p = 0.1;                     // target head fraction per round
    std::int64_t round = 0;             // current round index, advanced by the runner
    std::vector<std::uint8_t> eligible; // per node: may still head this epoch

    explicit LeachState(double p_, int node_count) : p(p_) {
        if (!(p > 0.0 && p < 1.0))
            throw std::invalid_argument("LEACH p must be in (0, 1)");
        eligible.assign(static_cast<std::size_t>(node_count), 1);
    }

    // floor(1/p), with a tiny guard so fractions that are exact in decimal
    // (p = 0.02 and friends) do not land one below the intended epoch.
    std::int64_t epoch_length() const {
        return static_cast<std::int64_t>(std::floor(1.0 / p + 1e-9));
    }
};

// Election threshold for one node. Zero once the node has served this epoch;
// on the epoch's last round the denominator makes the threshold reach 1, so
// every still-eligible node becomes a head and the rotation closes.
inline double leach_threshold(const LeachState& st, int node_id) {
    if (!st.eligible[static_cast<std::size_t>(node_id)])
        return 0.0;
    const double r_mod = static_cast<double>(st.round % st.epoch_length());
    return st.p / (1.0 - st.p * r_mod);
}

// Draws for every alive node (ascending id) and returns the new head set.
// Elected nodes become ineligible for the rest of the epoch.
inline std::vector<int> leach_elect(Network& net, LeachState& st, Rng& rng) {
    if (st.round % st.epoch_length() == 0)
        std::fill(st.eligible.begin(), st.eligible.end(), 1);
    std::vector<int> heads;
    for (SensorNode& n : net.nodes()) {
        if (!n.alive)
            continue;
        const double u = rng.next_unit();
        if (u < leach_threshold(st, n.id)) {
            heads.push_back(n.id);
            st.eligible[static_cast<std::size_t>(n.id)] = 0;
            n.role = NodeRole::Head;
        }
    }
    return heads;
}

// ---------------------------------------------------------------------------
// FCA

struct FcaParams {
    double t = 0.25;      // volunteering probability
    double r_max = 25.0;  // largest competition radius, meters
    double d_max = 1.0;   // normalization constant for base-station distance

    void validate() const {
        if (!(t > 0.0 && t < 1.0))
            throw std::invalid_argument("FCA t must be in (0, 1)");
        if (!(r_max > 0.0))
            throw std::invalid_argument("FCA r_max must be positive");
        if (!(d_max > 0.0))
            throw std::invalid_argument("FCA d_max must be positive");
    }
};

struct TentativeHead {
    int id = 0;
    double r_comp = 0.0;          // fuzzy competition radius, meters
    double residual_energy = 0.0; // battery level when the node volunteered
    bool quit = false;
};

// Every alive node volunteers with probability t (one draw each, ascending
// id). A volunteer computes its competition radius from its normalized
// base-station distance and normalized residual energy.
inline std::vector<TentativeHead> fca_select_tentatives(Network& net, const FcaParams& fp,
                                                        const FuzzyEngine& engine, Rng& rng) {
    std::vector<TentativeHead> out;
    for (SensorNode& n : net.nodes()) {
        if (!n.alive)
            continue;
        const double u = rng.next_unit();
        if (u < fp.t) {
            const double d_norm = net.distance_to_bs(n.id) / fp.d_max;
            const double e_norm = n.residual_energy / net.initial_energy();
            const double r = engine.compute_radius(d_norm, e_norm, fp.r_max);
            out.push_back({n.id, r, n.residual_energy, false});
            n.role = NodeRole::TentativeHead;
        }
    }
    return out;
}

// Resolves the tentative-head competition. Tentatives are processed in
// descending residual energy (ties to the lower id); one quits when an
// already-confirmed stronger tentative lies within the larger of the two
// competition radii. Returns surviving ids in ascending order and marks the
// quit flags in place.
inline std::vector<int> fca_compete(std::vector<TentativeHead>& tentatives, const Network& net) {
    std::vector<int> order(tentatives.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const TentativeHead& ta = tentatives[static_cast<std::size_t>(a)];
        const TentativeHead& tb = tentatives[static_cast<std::size_t>(b)];
        if (ta.residual_energy != tb.residual_energy)
            return ta.residual_energy > tb.residual_energy;
        return ta.id < tb.id;
    });
    std::vector<int> survivors; // indices into tentatives
    for (int idx : order) {
        TentativeHead& cand = tentatives[static_cast<std::size_t>(idx)];
        bool beaten = false;
        for (int s : survivors) {
            const TentativeHead& winner = tentatives[static_cast<std::size_t>(s)];
            const double d = distance(net.node(cand.id).position, net.node(winner.id).position);
            if (d <= std::max(cand.r_comp, winner.r_comp)) {
                beaten = true;
                break;
            }
        }
        if (beaten)
            cand.quit = true;
        else
            survivors.push_back(idx);
    }
    std::vector<int> heads;
    for (const TentativeHead& t : tentatives)
        if (!t.quit)
            heads.push_back(t.id);
    return heads;
}

// ---------------------------------------------------------------------------
// Cluster formation and the data round

struct ClusterAssignment {
    std::vector<int> heads;                // alive heads, ascending id
    std::vector<int> member_of;            // per node: own head id, or -1
    std::vector<std::vector<int>> members; // per head (aligned with heads)
    std::vector<int> direct_to_bs;         // alive non-heads with no head to join
};

// Every alive non-head joins its nearest alive head, ties to the lower head
// id. With no heads at all the round degrades to direct base-station uplinks.
inline ClusterAssignment form_clusters(const Network& net, const std::vector<int>& heads) {
    ClusterAssignment out;
    out.heads = heads;
    std::sort(out.heads.begin(), out.heads.end());
    out.member_of.assign(static_cast<std::size_t>(net.size()), -1);
    out.members.resize(out.heads.size());
    for (std::size_t h = 0; h < out.heads.size(); ++h)
        out.member_of[static_cast<std::size_t>(out.heads[h])] = out.heads[h];
    for (const SensorNode& n : net.nodes()) {
        if (!n.alive || n.role == NodeRole::Head)
            continue;
        if (out.heads.empty()) {
            out.direct_to_bs.push_back(n.id);
            continue;
        }
        int best = -1;
        double best_d = 0.0;
        for (std::size_t h = 0; h < out.heads.size(); ++h) {
            const double d = distance(n.position, net.node(out.heads[h]).position);
            if (best < 0 || d < best_d) {
                best = static_cast<int>(h);
                best_d = d;
            }
        }
        out.member_of[static_cast<std::size_t>(n.id)] = out.heads[static_cast<std::size_t>(best)];
        out.members[static_cast<std::size_t>(best)].push_back(n.id);
    }
    return out;
}

struct RoundContext {
    RadioParams radio{};
    std::int64_t packet_bits = 4000;
    double aggregation_ratio = 0.10;
    double advert_radius = 25.0; // LEACH head adverts broadcast this far
};

// One head (or tentative head) advertisement: the sender pays a control
// transmission sized to `radius`, every other alive node within that range
// pays a control reception. Returns the joules drained.
inline double charge_broadcast(Network& net, int sender, double radius,
                               const RoundContext& ctx) {
    double consumed = 0.0;
    const double bits = static_cast<double>(ctx.radio.ctrl_bits);
    consumed += net.apply_charge(sender, tx_cost(ctx.radio, bits, radius, ChargeKind::TxCtrl));
    const Vec2 at = net.node(sender).position;
    for (const SensorNode& n : net.nodes()) {
        if (n.id == sender || !n.alive)
            continue;
        if (distance(n.position, at) <= radius)
            consumed += net.apply_charge(n.id, rx_cost(ctx.radio, bits, ChargeKind::RxCtrl));
    }
    return consumed;
}

// The data phase. Members transmit one packet to their head; heads receive,
// aggregate their cluster's packets (their own included) and uplink the
// compressed payload to the base station; unclustered nodes uplink their
// packet directly. A node that dies part-way keeps the charges already paid
// and skips the rest; recipients are only charged for packets whose sender
// was alive to send them.
inline double run_steady_state(Network& net, const ClusterAssignment& assignment,
                               const RoundContext& ctx) {
    double consumed = 0.0;
    const double bits = static_cast<double>(ctx.packet_bits);

    for (std::size_t h = 0; h < assignment.heads.size(); ++h) {
        const int head = assignment.heads[h];
        for (int m : assignment.members[h]) {
            if (!net.node(m).alive)
                continue;
            const double d = distance(net.node(m).position, net.node(head).position);
            consumed += net.apply_charge(m, tx_cost(ctx.radio, bits, d));
            if (net.node(head).alive)
                consumed += net.apply_charge(head, rx_cost(ctx.radio, bits));
        }
    }

    for (std::size_t h = 0; h < assignment.heads.size(); ++h) {
        const int head = assignment.heads[h];
        if (!net.node(head).alive)
            continue;
        const double cluster_packets =
            static_cast<double>(assignment.members[h].size()) + 1.0;
        consumed += net.apply_charge(head, agg_cost(ctx.radio, cluster_packets * bits));
        if (!net.node(head).alive)
            continue;
        const double uplink_bits = ctx.aggregation_ratio * cluster_packets * bits;
        consumed += net.apply_charge(
            head, tx_cost(ctx.radio, uplink_bits, net.distance_to_bs(head)));
    }

    for (int id : assignment.direct_to_bs) {
        if (!net.node(id).alive)
            continue;
        consumed += net.apply_charge(id, tx_cost(ctx.radio, bits, net.distance_to_bs(id)));
    }

    return consumed;
}

struct RoundMetrics {
    int alive = 0;               // alive nodes at the end of the round
    int heads = 0;               // heads that served this round
    double energy_consumed = 0.0; // joules drained from batteries this round
};

// Per-round snapshot handed to an observer, for tests and audits. The spans
// and references are only valid during the callback.
struct RoundTrace {
    Protocol protocol;
    std::int64_t round;
    const Network& network;
    const RoundMetrics& metrics;
    const ClusterAssignment& assignment;
    std::span<const TentativeHead> final_heads; // FCA survivors with radii; empty for LEACH
};

using RoundObserver = std::function<void(const RoundTrace&)>;

namespace detail {
inline void reset_roles(Network& net) {
    for (SensorNode& n : net.nodes())
        n.role = NodeRole::Member;
}
} // namespace detail

// One LEACH round: elect, advertise, cluster, move data.
inline RoundMetrics leach_run_round(Network& net, LeachState& st, const RoundContext& ctx,
                                    Rng& rng, const RoundObserver* observer = nullptr) {
    detail::reset_roles(net);
    const std::vector<int> elected = leach_elect(net, st, rng);

    double consumed = 0.0;
    for (int h : elected)
        consumed += charge_broadcast(net, h, ctx.advert_radius, ctx);

    std::vector<int> serving;
    for (int h : elected)
        if (net.node(h).alive)
            serving.push_back(h);
        else
            net.node(h).role = NodeRole::Member;

    const ClusterAssignment assignment = form_clusters(net, serving);
    consumed += run_steady_state(net, assignment, ctx);

    RoundMetrics m{net.alive_count(), static_cast<int>(serving.size()), consumed};
    if (observer && *observer)
        (*observer)({Protocol::Leach, st.round, net, m, assignment, {}});
    st.round += 1;
    return m;
}

// One FCA round: volunteer, advertise, compete, cluster, move data.
inline RoundMetrics fca_run_round(Network& net, const FcaParams& fp, const FuzzyEngine& engine,
                                  std::int64_t round, const RoundContext& ctx, Rng& rng,
                                  const RoundObserver* observer = nullptr) {
    detail::reset_roles(net);
    std::vector<TentativeHead> tentatives = fca_select_tentatives(net, fp, engine, rng);

    double consumed = 0.0;
    for (const TentativeHead& t : tentatives)
        consumed += charge_broadcast(net, t.id, t.r_comp, ctx);

    // A volunteer that spent itself on the advertisement is out of the race.
    std::vector<TentativeHead> contenders;
    for (const TentativeHead& t : tentatives)
        if (net.node(t.id).alive)
            contenders.push_back(t);
        else
            net.node(t.id).role = NodeRole::Member;

    const std::vector<int> heads = fca_compete(contenders, net);
    std::vector<TentativeHead> winners;
    for (const TentativeHead& t : contenders) {
        if (t.quit) {
            net.node(t.id).role = NodeRole::Member;
        } else {
            net.node(t.id).role = NodeRole::Head;
            winners.push_back(t);
        }
    }

    const ClusterAssignment assignment = form_clusters(net, heads);
    consumed += run_steady_state(net, assignment, ctx);

    RoundMetrics m{net.alive_count(), static_cast<int>(heads.size()), consumed};
    if (observer && *observer)
        (*observer)({Protocol::Fca, round, net, m, assignment, winners});
    return m;
}

} // namespace wsn
