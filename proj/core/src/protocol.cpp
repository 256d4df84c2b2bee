#include "saer/protocol.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "saer/rng.hpp"

namespace saer {

Simulation::Simulation(const BipartiteGraph& g, ProtocolKind kind, std::uint32_t c,
                       std::uint32_t d, std::uint64_t seed, MetricsLevel metrics,
                       std::optional<std::vector<std::uint32_t>> quotas)
    : g_(&g),
      kind_(kind),
      c_(c),
      d_(d),
      seed_(seed),
      metrics_(metrics),
      observables_(g, c, d, metrics) {
    if (g.size() == 0) throw std::invalid_argument("empty graph");
    if (c == 0 || d == 0) throw std::invalid_argument("c and d must be at least 1");

    clients_.resize(g.size());
    servers_.resize(g.size());
    if (quotas) {
        if (quotas->size() != g.size())
            throw std::invalid_argument("quotas must have one entry per client");
        for (std::uint32_t v = 0; v < g.size(); ++v) {
            if ((*quotas)[v] > d)
                throw std::invalid_argument("quota of client " + std::to_string(v) +
                                            " exceeds d");
            clients_[v].request_quota = (*quotas)[v];
        }
    } else {
        for (auto& cs : clients_) cs.request_quota = d;
    }
    for (const auto& cs : clients_) alive_ += cs.request_quota;
}

RequestBatch Simulation::draw_requests(std::uint64_t round_index) const {
    RequestBatch batch;
    batch.requests.reserve(alive_);
    batch.per_server_requests.assign(g_->size(), 0);
    for (std::uint32_t v = 0; v < g_->size(); ++v) {
        const std::uint32_t k = clients_[v].request_quota - clients_[v].accepted_count;
        if (k == 0) continue;
        SplitMix64 gen(substream(seed_, round_index, v));
        const auto neighbors = g_->client_neighbors(v);
        for (std::uint32_t slot = 0; slot < k; ++slot) {
            const auto u = neighbors[gen.bounded(neighbors.size())];
            batch.requests.push_back({v, u, slot});
            batch.per_server_requests[u]++;
        }
    }
    return batch;
}

RequestBatch Simulation::phase1() const {
    if (complete()) throw std::logic_error("run already complete");
    return draw_requests(round_ + 1);
}

Phase2Summary Simulation::phase2(const RequestBatch& batch) {
    round_++;
    Phase2Summary out;
    out.server_accepted.assign(g_->size(), 0);
    const std::uint64_t threshold = static_cast<std::uint64_t>(c_) * d_;

    for (std::uint32_t u = 0; u < g_->size(); ++u) {
        const std::uint32_t r = batch.per_server_requests[u];
        if (r == 0) continue;
        auto& srv = servers_[u];
        srv.cumulative_received += r;
        bool accept;
        if (kind_ == ProtocolKind::Saer) {
            if (srv.burned) {
                accept = false;
            } else if (srv.cumulative_received > threshold) {
                accept = false;
                srv.burned = true;
                burned_count_++;
                out.newly_burned.push_back(u);
            } else {
                accept = true;
            }
        } else {
            accept = srv.accepted_load + r <= threshold;
        }
        if (accept) {
            srv.accepted_load += r;
            out.server_accepted[u] = 1;
        }
    }

    for (const auto& req : batch.requests) {
        if (out.server_accepted[req.server]) {
            clients_[req.client].accepted_count++;
            out.accepted_balls++;
        }
    }
    alive_ -= out.accepted_balls;
    total_requests_ += batch.total();
    return out;
}

RoundRecord Simulation::step() {
    if (complete()) throw std::logic_error("run already complete");
    [[maybe_unused]] const std::uint64_t alive_before = alive_;
    const RequestBatch batch = draw_requests(round_ + 1);
    const Phase2Summary summary = phase2(batch);  // advances the round counter
    observables_.observe_round(batch.per_server_requests, summary.newly_burned);

    RoundRecord rec;
    rec.round = round_;
    rec.requests_sent = batch.total();
    rec.accepted = summary.accepted_balls;
    rec.alive_after = alive_;
    rec.burned_servers = burned_count_;
    rec.messages = 2 * rec.requests_sent;
    rec.full_metrics = observables_.full();
    if (rec.full_metrics) {
        rec.s_t = observables_.s_t();
        rec.k_t = observables_.k_t();
        rec.r_t_max = observables_.r_t_max();
    }

    assert(rec.requests_sent == alive_before);
    assert(rec.alive_after == alive_before - rec.accepted);
#ifndef NDEBUG
    std::uint64_t placed = 0, loaded = 0;
    for (const auto& cs : clients_) placed += cs.accepted_count;
    for (const auto& sv : servers_) {
        loaded += sv.accepted_load;
        assert(sv.accepted_load <= static_cast<std::uint64_t>(c_) * d_);
        assert(sv.accepted_load <= sv.cumulative_received);
    }
    assert(placed == loaded);
#endif
    return rec;
}

RunResult Simulation::run_to_completion(std::uint64_t max_rounds) {
    if (max_rounds == 0) throw std::invalid_argument("max_rounds must be at least 1");

    RunResult result;
    result.params = params(max_rounds);
    while (!complete() && round_ < max_rounds) result.trajectory.push_back(step());

    result.non_terminated = !complete();
    result.completion_round =
        result.non_terminated ? RunResult::kNonTerminated : static_cast<std::int64_t>(round_);
    result.work = accumulate_work(result.trajectory);
    result.max_load = max_load();
    result.max_s_t = 0.0;
    for (const auto& rec : result.trajectory)
        if (rec.full_metrics) result.max_s_t = std::max(result.max_s_t, rec.s_t);
    return result;
}

std::uint64_t Simulation::max_load() const noexcept {
    std::uint64_t m = 0;
    for (const auto& srv : servers_) m = std::max(m, srv.accepted_load);
    return m;
}

RunParams Simulation::params(std::uint64_t max_rounds) const {
    return RunParams{kind_, g_->size(), c_, d_, seed_, max_rounds, metrics_};
}

std::uint64_t Simulation::default_max_rounds(std::uint32_t n) {
    return static_cast<std::uint64_t>(std::ceil(10.0 * std::log(static_cast<double>(n)))) + 10;
}

}  // namespace saer
