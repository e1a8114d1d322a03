#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "wsn/fuzzy.hpp"
#include "wsn/network.hpp"
#include "wsn/protocol.hpp"
#include "wsn/rng.hpp"

// Trial harness: deploys a field from a seed, runs rounds until the network
// dies out (or a round cap), extracts lifetime metrics, and aggregates
// multi-seed comparisons between the two protocols. Trials are independent;
// they may run on several threads, but results are always collected in seed
// order, so the thread count never changes any output.

namespace wsn {

struct ScenarioConfig {
    double area_width = 200.0;  // meters
    double area_height = 200.0; // meters
    Vec2 bs{100.0, 100.0};
    int node_count = 75;
    double initial_energy = 1.0; // joules per node
    std::int64_t packet_bits = 4000;
    double aggregation_ratio = 0.10; // uplink payload fraction after aggregation
    std::int64_t max_rounds = 5000;
    int trials = 50;
    std::uint64_t base_seed = 1;

    RadioParams radio{};
    double leach_p = 0.1;
    double fca_t = 0.25;
    double fca_r_max = 25.0; // meters
    FuzzySystemSpec fuzzy{};

    // Largest possible node-to-base-station distance: the field corner
    // farthest from the base station. Normalizes the fuzzy distance input.
    double d_max() const {
        double best = 0.0;
        for (double cx : {0.0, area_width})
            for (double cy : {0.0, area_height})
                best = std::max(best, distance({cx, cy}, bs));
        return best;
    }

    void validate() const {
        if (!(area_width > 0.0) || !(area_height > 0.0))
            throw std::invalid_argument("deployment area must have positive size");
        if (!(std::isfinite(bs.x) && std::isfinite(bs.y)))
            throw std::invalid_argument("base station position must be finite");
        if (node_count < 2)
            throw std::invalid_argument("node_count must be at least 2");
        if (!(initial_energy > 0.0))
            throw std::invalid_argument("initial_energy must be positive");
        if (packet_bits < 1)
            throw std::invalid_argument("packet_bits must be at least 1");
        if (!(aggregation_ratio > 0.0 && aggregation_ratio <= 1.0))
            throw std::invalid_argument("aggregation_ratio must be in (0, 1]");
        if (max_rounds < 1)
            throw std::invalid_argument("max_rounds must be at least 1");
        if (trials < 1)
            throw std::invalid_argument("trials must be at least 1");
        radio.validate();
        if (!(leach_p > 0.0 && leach_p < 1.0))
            throw std::invalid_argument("leach p must be in (0, 1)");
        FcaParams{fca_t, fca_r_max, 1.0}.validate();
    }

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// Uniform deployment over the field: per node one x draw then one y draw,
// ascending id, so the node layout is a pure function of the seed.
inline std::vector<SensorNode> deploy(const ScenarioConfig& cfg, Rng& rng) {
    std::vector<SensorNode> nodes;
    nodes.reserve(static_cast<std::size_t>(cfg.node_count));
    for (int i = 0; i < cfg.node_count; ++i) {
        SensorNode n;
        n.id = i;
        n.position.x = rng.next_in(0.0, cfg.area_width);
        n.position.y = rng.next_in(0.0, cfg.area_height);
        n.residual_energy = cfg.initial_energy;
        n.alive = true;
        nodes.push_back(n);
    }
    return nodes;
}

struct SeriesPoint {
    std::int64_t round = 0;
    int alive = 0;
    int heads = 0;
    double energy_consumed = 0.0; // joules drained across the network this round
};

struct MalformedSeries : std::runtime_error {
    explicit MalformedSeries(const std::string& what) : std::runtime_error(what) {}
};

struct LifetimeMetrics {
    std::optional<std::int64_t> fnd; // first round that ended with a death
    std::optional<std::int64_t> hna; // first round with at most half the nodes alive
};

inline LifetimeMetrics extract_metrics(std::span<const SeriesPoint> series, int node_count) {
    LifetimeMetrics m;
    int prev = node_count;
    for (const SeriesPoint& p : series) {
        if (p.alive > prev)
            throw MalformedSeries("alive count rose from " + std::to_string(prev) + " to " +
                                  std::to_string(p.alive) + " at round " +
                                  std::to_string(p.round));
        if (!m.fnd && p.alive < node_count)
            m.fnd = p.round;
        if (!m.hna && p.alive <= node_count / 2)
            m.hna = p.round;
        prev = p.alive;
    }
    return m;
}

struct TrialResult {
    std::uint64_t seed = 0;
    std::optional<std::int64_t> fnd;
    std::optional<std::int64_t> hna;
    std::vector<SeriesPoint> series;
};

// One full lifetime simulation of one protocol from one seed. The same seed
// always yields the same deployment regardless of protocol, which is what
// makes per-seed comparisons paired.
inline TrialResult run_trial(const ScenarioConfig& cfg, Protocol protocol, std::uint64_t seed,
                             const FuzzyEngine& engine, const RoundObserver* observer = nullptr) {
    Rng rng(seed);
    Network net(deploy(cfg, rng), cfg.bs, cfg.initial_energy);
    RoundContext ctx{cfg.radio, cfg.packet_bits, cfg.aggregation_ratio, cfg.fca_r_max};

    TrialResult tr;
    tr.seed = seed;
    tr.series.reserve(1024);

    if (protocol == Protocol::Leach) {
        LeachState st(cfg.leach_p, cfg.node_count);
        for (std::int64_t r = 0; r < cfg.max_rounds && net.alive_count() > 0; ++r) {
            const RoundMetrics m = leach_run_round(net, st, ctx, rng, observer);
            tr.series.push_back({r, m.alive, m.heads, m.energy_consumed});
        }
    } else {
        FcaParams fp{cfg.fca_t, cfg.fca_r_max, cfg.d_max()};
        for (std::int64_t r = 0; r < cfg.max_rounds && net.alive_count() > 0; ++r) {
            const RoundMetrics m = fca_run_round(net, fp, engine, r, ctx, rng, observer);
            tr.series.push_back({r, m.alive, m.heads, m.energy_consumed});
        }
    }

    const LifetimeMetrics lm = extract_metrics(tr.series, cfg.node_count);
    tr.fnd = lm.fnd;
    tr.hna = lm.hna;
    return tr;
}

struct MeanSeriesPoint {
    std::int64_t round = 0;
    double alive = 0.0;
    double heads = 0.0;
    double energy_consumed = 0.0;
};

struct ProtocolAggregate {
    std::vector<TrialResult> trials;   // seed order
    int fnd_defined = 0;               // trials whose network lost a node in time
    int hna_defined = 0;
    std::optional<double> mean_fnd, std_fnd;
    std::optional<double> mean_hna, std_hna;
    std::vector<MeanSeriesPoint> series; // per-round means; finished trials count as zero
};

struct AggregateResult {
    std::optional<ProtocolAggregate> leach;
    std::optional<ProtocolAggregate> fca;
    // Fraction of seeds where FCA strictly outlived LEACH on the metric.
    // A metric that never triggered counts as infinitely late.
    std::optional<double> win_rate_fnd;
    std::optional<double> win_rate_hna;
};

enum class ProtocolChoice { Leach, Fca, Both };

using ObserverFactory = std::function<RoundObserver(Protocol, std::uint64_t seed)>;

struct ScenarioOptions {
    int threads = 0; // 0 = hardware concurrency
    // Called once per (protocol, seed) before the trial starts; the returned
    // observer sees every round of that trial. Must be thread-safe across
    // trials when threads > 1.
    ObserverFactory observer_factory;
};

namespace detail {

inline ProtocolAggregate aggregate_protocol(std::vector<TrialResult> trials) {
    ProtocolAggregate agg;
    agg.trials = std::move(trials);

    auto fold = [&](auto pick, int& defined, std::optional<double>& mean,
                    std::optional<double>& sd) {
        double sum = 0.0;
        defined = 0;
        for (const TrialResult& t : agg.trials) {
            if (pick(t)) {
                sum += static_cast<double>(*pick(t));
                ++defined;
            }
        }
        if (defined == 0)
            return;
        const double m = sum / defined;
        double var = 0.0;
        for (const TrialResult& t : agg.trials)
            if (pick(t)) {
                const double d = static_cast<double>(*pick(t)) - m;
                var += d * d;
            }
        mean = m;
        sd = std::sqrt(var / defined);
    };
    fold([](const TrialResult& t) { return t.fnd; }, agg.fnd_defined, agg.mean_fnd, agg.std_fnd);
    fold([](const TrialResult& t) { return t.hna; }, agg.hna_defined, agg.mean_hna, agg.std_hna);

    std::size_t longest = 0;
    for (const TrialResult& t : agg.trials)
        longest = std::max(longest, t.series.size());
    agg.series.resize(longest);
    for (std::size_t r = 0; r < longest; ++r) {
        MeanSeriesPoint& p = agg.series[r];
        p.round = static_cast<std::int64_t>(r);
        for (const TrialResult& t : agg.trials) {
            if (r < t.series.size()) {
                p.alive += t.series[r].alive;
                p.heads += t.series[r].heads;
                p.energy_consumed += t.series[r].energy_consumed;
            }
        }
        const double n = static_cast<double>(agg.trials.size());
        p.alive /= n;
        p.heads /= n;
        p.energy_consumed /= n;
    }
    return agg;
}

inline double metric_or_inf(const std::optional<std::int64_t>& v) {
    return v ? static_cast<double>(*v) : std::numeric_limits<double>::infinity();
}

} // namespace detail

// Runs every requested (protocol, seed) pair and aggregates. Seeds are
// base_seed .. base_seed + trials - 1; trial k of each protocol shares a seed
// and therefore a deployment.
inline AggregateResult run_scenario(const ScenarioConfig& cfg,
                                    ProtocolChoice choice = ProtocolChoice::Both,
                                    const ScenarioOptions& opts = {}) {
    cfg.validate();
    const FuzzyEngine engine(cfg.fuzzy);

    std::vector<Protocol> protocols;
    if (choice != ProtocolChoice::Fca)
        protocols.push_back(Protocol::Leach);
    if (choice != ProtocolChoice::Leach)
        protocols.push_back(Protocol::Fca);

    struct Job {
        Protocol protocol;
        int trial;
    };
    std::vector<Job> jobs;
    for (Protocol p : protocols)
        for (int t = 0; t < cfg.trials; ++t)
            jobs.push_back({p, t});

    std::vector<std::vector<TrialResult>> results(protocols.size());
    for (auto& r : results)
        r.resize(static_cast<std::size_t>(cfg.trials));

    auto run_job = [&](const Job& job) {
        const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(job.trial);
        RoundObserver obs;
        if (opts.observer_factory)
            obs = opts.observer_factory(job.protocol, seed);
        const std::size_t slot = job.protocol == protocols[0] ? 0 : 1;
        results[slot][static_cast<std::size_t>(job.trial)] =
            run_trial(cfg, job.protocol, seed, engine, obs ? &obs : nullptr);
    };

    int threads = opts.threads > 0 ? opts.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
    if (threads == 1) {
        for (const Job& j : jobs)
            run_job(j);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int i = 0; i < threads; ++i)
            pool.emplace_back([&] {
                for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();)
                    run_job(jobs[j]);
            });
        for (std::thread& th : pool)
            th.join();
    }

    AggregateResult out;
    for (std::size_t i = 0; i < protocols.size(); ++i) {
        ProtocolAggregate agg = detail::aggregate_protocol(std::move(results[i]));
        if (protocols[i] == Protocol::Leach)
            out.leach = std::move(agg);
        else
            out.fca = std::move(agg);
    }

    if (out.leach && out.fca) {
        int wins_fnd = 0, wins_hna = 0;
        for (int t = 0; t < cfg.trials; ++t) {
            const TrialResult& l = out.leach->trials[static_cast<std::size_t>(t)];
            const TrialResult& f = out.fca->trials[static_cast<std::size_t>(t)];
            if (detail::metric_or_inf(f.fnd) > detail::metric_or_inf(l.fnd))
                ++wins_fnd;
            if (detail::metric_or_inf(f.hna) > detail::metric_or_inf(l.hna))
                ++wins_hna;
        }
        out.win_rate_fnd = static_cast<double>(wins_fnd) / cfg.trials;
        out.win_rate_hna = static_cast<double>(wins_hna) / cfg.trials;
    }
    return out;
}

} // namespace wsn
