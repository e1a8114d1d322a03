#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "wsn/energy.hpp"

namespace wsn {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double distance(Vec2 a, Vec2 b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

enum class NodeRole { Member, TentativeHead, Head };

struct SensorNode {
    int id = 0;
    Vec2 position{};
    double residual_energy = 0.0;
    bool alive = true;
    NodeRole role = NodeRole::Member;
};

// The deployed field: nodes, the base station, and the battery every node
// started with. All energy spending goes through apply_charge so that alive
// flags, the alive counter, and the per-call delivered amount stay coherent.
class Network {
public:
    Network(std::vector<SensorNode> nodes, Vec2 bs, double initial_energy)
        : nodes_(std::move(nodes)), bs_(bs), initial_energy_(initial_energy) {
        if (initial_energy_ <= 0.0)
            throw std::invalid_argument("initial energy must be positive");
        bs_dist_.reserve(nodes_.size());
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (nodes_[i].id != static_cast<int>(i))
                throw std::invalid_argument("node ids must be 0..n-1 in order");
            bs_dist_.push_back(distance(nodes_[i].position, bs_));
            if (nodes_[i].alive)
                ++alive_;
        }
    }

    std::span<SensorNode> nodes() { return nodes_; }
    std::span<const SensorNode> nodes() const { return nodes_; }
    SensorNode& node(int id) { return nodes_[static_cast<std::size_t>(id)]; }
    const SensorNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
    int size() const { return static_cast<int>(nodes_.size()); }

    Vec2 bs() const { return bs_; }
    double initial_energy() const { return initial_energy_; }
    double distance_to_bs(int id) const { return bs_dist_[static_cast<std::size_t>(id)]; }

    int alive_count() const { return alive_; }

    double total_energy() const {
        double sum = 0.0;
        for (const SensorNode& n : nodes_)
            sum += n.residual_energy;
        return sum;
    }

    // Debits one node's battery. Returns the joules actually drained, which
    // is less than the charge when the battery ran dry. Dead nodes are never
    // charged.
    double apply_charge(int id, const EnergyCharge& charge) {
        SensorNode& n = node(id);
        if (!n.alive)
            return 0.0;
        const double before = n.residual_energy;
        const DebitResult r = debit(before, charge);
        n.residual_energy = r.energy;
        if (r.died) {
            n.alive = false;
            --alive_;
        }
        return before - r.energy;
    }

private:
    std::vector<SensorNode> nodes_;
    Vec2 bs_;
    double initial_energy_;
    std::vector<double> bs_dist_;
    int alive_ = 0;
};

} // namespace wsn
