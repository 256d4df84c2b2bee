#include "saer/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace saer {

NeighborhoodSums neighborhood_request_sums(const BipartiteGraph& g,
                                           std::span<const std::uint32_t> per_server_requests) {
    NeighborhoodSums out;
    out.per_client.assign(g.size(), 0);
    for (std::uint32_t u = 0; u < g.size(); ++u) {
        const std::uint32_t r = per_server_requests[u];
        if (r == 0) continue;
        for (const auto v : g.server_neighbors(u)) out.per_client[v] += r;
    }
    for (const auto s : out.per_client) out.max = std::max(out.max, s);
    return out;
}

BurnedFractions burned_fraction(const BipartiteGraph& g, std::span<const std::uint8_t> burned) {
    BurnedFractions out;
    out.per_client.assign(g.size(), 0.0);
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        std::uint32_t count = 0;
        for (const auto u : g.client_neighbors(v)) count += burned[u] ? 1 : 0;
        out.per_client[v] = static_cast<double>(count) / g.client_degree(v);
        out.max = std::max(out.max, out.per_client[v]);
    }
    return out;
}

KStatistic k_statistic(const BipartiteGraph& g, std::uint64_t c, std::uint64_t d,
                       std::span<const std::uint64_t> cumulative_neighborhood_sums) {
    KStatistic out;
    out.per_client.assign(g.size(), 0.0);
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        out.per_client[v] = static_cast<double>(cumulative_neighborhood_sums[v]) /
                            (static_cast<double>(c * d) * g.client_degree(v));
        out.max = std::max(out.max, out.per_client[v]);
    }
    return out;
}

std::uint64_t accumulate_work(std::span<const RoundRecord> trajectory) {
    std::uint64_t w = 0;
    for (const auto& rec : trajectory) w += rec.messages;
    return w;
}

RoundObservables::RoundObservables(const BipartiteGraph& g, std::uint64_t c, std::uint64_t d,
                                   MetricsLevel level)
    : g_(&g), cd_(c * d), level_(level) {
    if (level_ == MetricsLevel::Full) {
        cumulative_.assign(g.size(), 0);
        round_.assign(g.size(), 0);
        burned_nb_.assign(g.size(), 0);
    }
}

void RoundObservables::observe_round(std::span<const std::uint32_t> per_server_requests,
                                     std::span<const std::uint32_t> newly_burned) {
    if (level_ != MetricsLevel::Full) return;

    std::fill(round_.begin(), round_.end(), 0);
    for (std::uint32_t u = 0; u < g_->size(); ++u) {
        const std::uint32_t r = per_server_requests[u];
        if (r == 0) continue;
        for (const auto v : g_->server_neighbors(u)) round_[v] += r;
    }
    for (const auto u : newly_burned)
        for (const auto v : g_->server_neighbors(u)) burned_nb_[v]++;

    s_t_ = 0.0;
    k_t_ = 0.0;
    r_t_max_ = 0;
    for (std::uint32_t v = 0; v < g_->size(); ++v) {
        cumulative_[v] += round_[v];
        r_t_max_ = std::max(r_t_max_, round_[v]);
        const double deg = g_->client_degree(v);
        s_t_ = std::max(s_t_, burned_nb_[v] / deg);
        k_t_ = std::max(k_t_, static_cast<double>(cumulative_[v]) /
                                  (static_cast<double>(cd_) * deg));
    }
}

}  // namespace saer
