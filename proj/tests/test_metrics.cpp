#include <doctest.h>

#include <vector>

#include "saer/graph.hpp"
#include "saer/metrics.hpp"
#include "saer/protocol.hpp"

using namespace saer;

TEST_CASE("neighborhood request sums") {
    SUBCASE("all-zero requests sum to zero") {
        const auto g = generate_regular(4, 2, 0);
        const std::vector<std::uint32_t> r(4, 0);
        const auto sums = neighborhood_request_sums(g, r);
        for (const auto s : sums.per_client) CHECK(s == 0);
        CHECK(sums.max == 0);
    }
    SUBCASE("K22 with r = (2, 0): every client sees 2") {
        const auto g = generate_regular(2, 2, 0);
        const std::vector<std::uint32_t> r{2, 0};
        const auto sums = neighborhood_request_sums(g, r);
        CHECK(sums.per_client == std::vector<std::uint64_t>{2, 2});
        CHECK(sums.max == 2);
    }
    SUBCASE("hand-built 3x3 graph") {
        // N(0) = {0, 2}, N(1) = {1}, N(2) = {0, 1, 2}
        const auto g = BipartiteGraph::from_edges(
            3, {{0, 0}, {0, 2}, {1, 1}, {2, 0}, {2, 1}, {2, 2}});
        const std::vector<std::uint32_t> r{1, 2, 3};
        const auto sums = neighborhood_request_sums(g, r);
        CHECK(sums.per_client == std::vector<std::uint64_t>{4, 2, 6});
        CHECK(sums.max == 6);
    }
}

TEST_CASE("burned fractions") {
    const auto g = generate_regular(4, 4, 0);  // K44
    SUBCASE("no server burned") {
        const std::vector<std::uint8_t> burned(4, 0);
        const auto f = burned_fraction(g, burned);
        for (const auto s : f.per_client) CHECK(s == 0.0);
        CHECK(f.max == 0.0);
    }
    SUBCASE("all servers burned") {
        const std::vector<std::uint8_t> burned(4, 1);
        const auto f = burned_fraction(g, burned);
        for (const auto s : f.per_client) CHECK(s == 1.0);
    }
    SUBCASE("one of four neighbors burned") {
        const std::vector<std::uint8_t> burned{0, 1, 0, 0};
        const auto f = burned_fraction(g, burned);
        for (const auto s : f.per_client) CHECK(s == 0.25);
    }
}

TEST_CASE("K statistic") {
    const auto g = generate_regular(4, 4, 0);
    SUBCASE("zero cumulative sums give K = 0") {
        const std::vector<std::uint64_t> cum(4, 0);
        CHECK(k_statistic(g, 2, 1, cum).max == 0.0);
    }
    SUBCASE("direct formula: 8 / (2 * 1 * 4) = 1") {
        const std::vector<std::uint64_t> cum{8, 4, 0, 0};
        const auto k = k_statistic(g, 2, 1, cum);
        CHECK(k.per_client[0] == 1.0);
        CHECK(k.per_client[1] == 0.5);
        CHECK(k.max == 1.0);
    }
    SUBCASE("per-client degree is the denominator") {
        const auto h = BipartiteGraph::from_edges(2, {{0, 0}, {1, 0}, {1, 1}});
        const std::vector<std::uint64_t> cum{6, 6};
        const auto k = k_statistic(h, 3, 1, cum);
        CHECK(k.per_client[0] == doctest::Approx(2.0));  // degree 1
        CHECK(k.per_client[1] == doctest::Approx(1.0));  // degree 2
    }
}

TEST_CASE("work accumulation") {
    SUBCASE("two rounds with 4 then 1 requests cost 10 messages") {
        std::vector<RoundRecord> traj(2);
        traj[0].requests_sent = 4;
        traj[0].messages = 8;
        traj[1].requests_sent = 1;
        traj[1].messages = 2;
        CHECK(accumulate_work(traj) == 10);
    }
    SUBCASE("empty trajectory costs nothing") {
        CHECK(accumulate_work(std::span<const RoundRecord>{}) == 0);
    }
}

TEST_CASE("incremental observables equal brute-force recomputation") {
    // Small random instances, stressed enough that servers actually burn.
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const std::uint32_t n = 16 + static_cast<std::uint32_t>(seed) * 6;
        const std::uint32_t delta = 3 + static_cast<std::uint32_t>(seed % 3);
        const auto g = generate_regular(n, delta, seed);
        const std::uint32_t c = 1 + static_cast<std::uint32_t>(seed % 2);
        const std::uint32_t d = 2;

        Simulation sim(g, ProtocolKind::Saer, c, d, seed * 7 + 1);
        RoundObservables incremental(g, c, d, MetricsLevel::Full);
        std::vector<std::uint64_t> cumulative_brute(n, 0);

        while (!sim.complete() && sim.round() < 30) {
            const auto batch = sim.phase1();
            const auto summary = sim.phase2(batch);
            incremental.observe_round(batch.per_server_requests, summary.newly_burned);

            // From-scratch route.
            const auto sums = neighborhood_request_sums(g, batch.per_server_requests);
            for (std::uint32_t v = 0; v < n; ++v) cumulative_brute[v] += sums.per_client[v];
            const auto k = k_statistic(g, c, d, cumulative_brute);
            std::vector<std::uint8_t> burned(n, 0);
            for (std::uint32_t u = 0; u < n; ++u) burned[u] = sim.servers()[u].burned;
            const auto s = burned_fraction(g, burned);

            CHECK(incremental.r_t_max() == sums.max);
            CHECK(incremental.k_t() == k.max);
            CHECK(incremental.s_t() == s.max);
            for (std::uint32_t v = 0; v < n; ++v) {
                CHECK(incremental.cumulative_sums()[v] == cumulative_brute[v]);
                CHECK(s.per_client[v] <= k.per_client[v]);  // S_t(v) <= K_t(v)
            }
        }
    }
}

TEST_CASE("round records satisfy S_t <= K_t and count messages correctly") {
    const auto g = generate_regular(48, 6, 12);
    Simulation sim(g, ProtocolKind::Saer, 1, 2, 3);
    double prev_s = 0.0;
    while (!sim.complete() && sim.round() < 40) {
        const auto rec = sim.step();
        CHECK(rec.s_t <= rec.k_t);
        CHECK(rec.s_t >= prev_s);  // burn monotonicity lifts to S_t
        CHECK(rec.messages == 2 * rec.requests_sent);
        prev_s = rec.s_t;
    }
}

TEST_CASE("neighborhood sums agree with the raw request batch") {
    const auto g = generate_regular(20, 4, 5);
    Simulation sim(g, ProtocolKind::Saer, 2, 2, 9);
    const auto batch = sim.phase1();
    const auto sums = neighborhood_request_sums(g, batch.per_server_requests);

    for (std::uint32_t v = 0; v < g.size(); ++v) {
        const auto nb = g.client_neighbors(v);
        std::uint64_t direct = 0;
        for (const auto& req : batch.requests)
            if (std::binary_search(nb.begin(), nb.end(), req.server)) direct++;
        CHECK(sums.per_client[v] == direct);
    }
}

TEST_CASE("light metrics skip the heavy observables") {
    const auto g = generate_regular(32, 4, 2);
    Simulation sim(g, ProtocolKind::Saer, 2, 1, 4, MetricsLevel::Light);
    const auto result = sim.run_to_completion(20);
    REQUIRE(!result.trajectory.empty());
    for (const auto& rec : result.trajectory) {
        CHECK_FALSE(rec.full_metrics);
        CHECK(rec.requests_sent > 0);
        CHECK(rec.messages == 2 * rec.requests_sent);
    }
    CHECK(result.work > 0);
}
