#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "saer/graph.hpp"
#include "saer/protocol.hpp"
#include "saer/rng.hpp"

using namespace saer;

namespace {

BipartiteGraph k22() { return generate_regular(2, 2, 0); }
BipartiteGraph matching2() { return generate_regular(2, 1, 0); }

std::uint64_t total_accepted(const Simulation& sim) {
    std::uint64_t placed = 0;
    for (const auto& cs : sim.clients()) placed += cs.accepted_count;
    return placed;
}

std::uint64_t total_load(const Simulation& sim) {
    std::uint64_t load = 0;
    for (const auto& sv : sim.servers()) load += sv.accepted_load;
    return load;
}

}  // namespace

TEST_CASE("fresh run state") {
    const auto g = k22();
    Simulation sim(g, ProtocolKind::Saer, 1, 1, 0);
    CHECK(sim.alive_balls() == 2);
    CHECK(sim.round() == 0);
    CHECK_FALSE(sim.complete());
    for (const auto& sv : sim.servers()) {
        CHECK(sv.accepted_load == 0);
        CHECK_FALSE(sv.burned);
    }
}

TEST_CASE("zero quotas complete immediately") {
    const auto g = k22();
    Simulation sim(g, ProtocolKind::Saer, 1, 1, 0, MetricsLevel::Full,
                   std::vector<std::uint32_t>{0, 0});
    CHECK(sim.complete());
    const auto result = sim.run_to_completion(10);
    CHECK(result.completion_round == 0);
    CHECK(result.work == 0);
    CHECK(result.trajectory.empty());
}

TEST_CASE("constructor validation") {
    const auto g = k22();
    CHECK_THROWS_AS(Simulation(g, ProtocolKind::Saer, 1, 1, 0, MetricsLevel::Full,
                               std::vector<std::uint32_t>{2, 0}),
                    std::invalid_argument);  // quota exceeds d
    CHECK_THROWS_AS(Simulation(g, ProtocolKind::Saer, 1, 1, 0, MetricsLevel::Full,
                               std::vector<std::uint32_t>{1}),
                    std::invalid_argument);  // wrong quota length
    CHECK_THROWS_AS(Simulation(g, ProtocolKind::Saer, 0, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(Simulation(g, ProtocolKind::Saer, 1, 0, 0), std::invalid_argument);
}

TEST_CASE("phase 1 request draws") {
    SUBCASE("clients without alive balls contribute nothing") {
        const auto g = matching2();
        Simulation sim(g, ProtocolKind::Saer, 1, 2, 7, MetricsLevel::Full,
                       std::vector<std::uint32_t>{0, 2});
        const auto batch = sim.phase1();
        CHECK(batch.total() == 2);
        for (const auto& req : batch.requests) CHECK(req.client == 1);
    }
    SUBCASE("a degree-1 client sends every ball to its only server") {
        const auto g = matching2();
        Simulation sim(g, ProtocolKind::Saer, 2, 2, 5);
        const auto batch = sim.phase1();
        CHECK(batch.total() == 4);
        for (std::uint32_t v = 0; v < 2; ++v) {
            const auto only = g.client_neighbors(v)[0];
            CHECK(batch.per_server_requests[only] == 2);
        }
    }
    SUBCASE("round 1 sends one request per ball") {
        const auto g = generate_regular(1000, 60, 7);
        Simulation sim(g, ProtocolKind::Saer, 2, 2, 1);
        const auto batch = sim.phase1();
        CHECK(batch.total() == 2000);
        std::uint64_t sum = 0;
        for (const auto r : batch.per_server_requests) sum += r;
        CHECK(sum == 2000);
        for (const auto& req : batch.requests) {
            const auto nb = g.client_neighbors(req.client);
            CHECK(std::binary_search(nb.begin(), nb.end(), req.server));
        }
    }
    SUBCASE("requests are listed in ascending (client, slot) order") {
        const auto g = generate_regular(32, 4, 2);
        Simulation sim(g, ProtocolKind::Saer, 2, 3, 9);
        const auto batch = sim.phase1();
        CHECK(std::is_sorted(batch.requests.begin(), batch.requests.end(),
                             [](const Request& a, const Request& b) {
                                 return std::tie(a.client, a.slot) < std::tie(b.client, b.slot);
                             }));
    }
    SUBCASE("draws come from the documented (seed, round, client) substream") {
        const auto g = generate_regular(16, 4, 3);
        const std::uint64_t seed = 42;
        Simulation sim(g, ProtocolKind::Saer, 2, 2, seed);
        const auto batch = sim.phase1();
        for (const auto& req : batch.requests) {
            SplitMix64 ref(substream(seed, 1, req.client));
            const auto nb = g.client_neighbors(req.client);
            std::uint32_t expected = 0;
            for (std::uint32_t s = 0; s <= req.slot; ++s)
                expected = nb[ref.bounded(nb.size())];
            // re-deriving per request replays the stream from the start
            SplitMix64 replay(substream(seed, 1, req.client));
            for (std::uint32_t s = 0; s < req.slot; ++s) replay.bounded(nb.size());
            CHECK(req.server == nb[replay.bounded(nb.size())]);
            CHECK(req.server == expected);
        }
    }
    SUBCASE("a client's draws do not depend on other clients' quotas") {
        const auto g = generate_regular(8, 3, 1);
        Simulation full(g, ProtocolKind::Saer, 2, 2, 77);
        Simulation sparse(g, ProtocolKind::Saer, 2, 2, 77, MetricsLevel::Full,
                          std::vector<std::uint32_t>{0, 2, 0, 2, 0, 2, 0, 2});
        const auto a = full.phase1();
        const auto b = sparse.phase1();
        for (const auto& req : b.requests) {
            const auto match = std::find_if(a.requests.begin(), a.requests.end(),
                                            [&](const Request& r) {
                                                return r.client == req.client &&
                                                       r.slot == req.slot;
                                            });
            REQUIRE(match != a.requests.end());
            CHECK(match->server == req.server);
        }
    }
}

TEST_CASE("phase 2, SAER: accept at the threshold, burn strictly above it") {
    // c=1, d=2 gives the same threshold c*d = 2 as the canonical trace.
    const auto g = k22();
    Simulation sim(g, ProtocolKind::Saer, 1, 2, 0);

    RequestBatch b1;
    b1.requests = {{0, 0, 0}, {0, 0, 1}};  // both of client 0's balls to server 0
    b1.per_server_requests = {2, 0};
    const auto s1 = sim.phase2(b1);
    CHECK(s1.accepted_balls == 2);
    CHECK(s1.server_accepted[0] == 1);
    CHECK(s1.newly_burned.empty());
    CHECK(sim.servers()[0].accepted_load == 2);
    CHECK(sim.servers()[0].cumulative_received == 2);
    CHECK_FALSE(sim.servers()[0].burned);

    RequestBatch b2;
    b2.requests = {{1, 0, 0}};  // one more ball: cumulative 3 > 2
    b2.per_server_requests = {1, 0};
    const auto s2 = sim.phase2(b2);
    CHECK(s2.accepted_balls == 0);
    CHECK(s2.newly_burned == std::vector<std::uint32_t>{0});
    CHECK(sim.servers()[0].burned);
    CHECK(sim.servers()[0].accepted_load == 2);
    CHECK(sim.servers()[0].cumulative_received == 3);

    RequestBatch b3 = b2;  // burned servers keep rejecting, no double burn
    const auto s3 = sim.phase2(b3);
    CHECK(s3.accepted_balls == 0);
    CHECK(s3.newly_burned.empty());
    CHECK(sim.servers()[0].cumulative_received == 4);

    RequestBatch b4;
    b4.requests = {{1, 1, 0}, {1, 1, 1}};  // untouched server accepts both
    b4.per_server_requests = {0, 2};
    const auto s4 = sim.phase2(b4);
    CHECK(s4.accepted_balls == 2);
    CHECK(sim.servers()[1].accepted_load == 2);
    CHECK(sim.complete());
}

TEST_CASE("phase 2, RAES: saturated servers reject the batch but stay eligible") {
    const auto g = generate_regular(3, 3, 0);
    Simulation sim(g, ProtocolKind::Raes, 2, 1, 0);  // threshold c*d = 2

    RequestBatch b1;
    b1.requests = {{0, 0, 0}};
    b1.per_server_requests = {1, 0, 0};
    CHECK(sim.phase2(b1).accepted_balls == 1);
    CHECK(sim.servers()[0].accepted_load == 1);

    RequestBatch b2;
    b2.requests = {{1, 0, 0}, {2, 0, 0}};  // 1 + 2 > 2: reject the whole batch
    b2.per_server_requests = {2, 0, 0};
    const auto s2 = sim.phase2(b2);
    CHECK(s2.accepted_balls == 0);
    CHECK(s2.server_accepted[0] == 0);
    CHECK_FALSE(sim.servers()[0].burned);
    CHECK(sim.servers()[0].accepted_load == 1);

    RequestBatch b3;
    b3.requests = {{1, 0, 0}};  // 1 + 1 <= 2: accepted later
    b3.per_server_requests = {1, 0, 0};
    CHECK(sim.phase2(b3).accepted_balls == 1);
    CHECK(sim.servers()[0].accepted_load == 2);

    RequestBatch b4;  // a server receiving nothing is untouched
    b4.per_server_requests = {0, 0, 0};
    CHECK(sim.phase2(b4).accepted_balls == 0);
    CHECK(sim.servers()[1].accepted_load == 0);
    CHECK(sim.servers()[1].cumulative_received == 0);
}

TEST_CASE("step on a complete run is an error") {
    const auto g = k22();
    Simulation sim(g, ProtocolKind::Saer, 1, 1, 0, MetricsLevel::Full,
                   std::vector<std::uint32_t>{0, 0});
    CHECK_THROWS_AS(sim.step(), std::logic_error);
    CHECK_THROWS_AS(sim.phase1(), std::logic_error);
}

TEST_CASE("K22 with c=2, d=1 completes in one round for every draw") {
    const auto g = k22();
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Simulation sim(g, ProtocolKind::Saer, 2, 1, seed);
        const auto result = sim.run_to_completion(10);
        CHECK(result.completion_round == 1);
        CHECK(result.max_load <= 2);
    }
}

TEST_CASE("perfect matching with c=1, d=1 completes in round one") {
    const auto g = matching2();
    Simulation sim(g, ProtocolKind::Saer, 1, 1, 3);
    const auto result = sim.run_to_completion(10);
    CHECK(result.completion_round == 1);
    CHECK(result.work == 4);  // two requests, two replies
    CHECK(result.max_load == 1);
}

TEST_CASE("non-termination is reachable on the tiny instance and reported") {
    const auto g = k22();
    bool saw_non_termination = false, saw_completion = false;
    for (std::uint64_t seed = 0; seed < 40 && !(saw_non_termination && saw_completion); ++seed) {
        Simulation sim(g, ProtocolKind::Saer, 1, 1, seed);
        const auto result = sim.run_to_completion(50);
        if (result.non_terminated) {
            saw_non_termination = true;
            CHECK(result.completion_round == RunResult::kNonTerminated);
        } else {
            saw_completion = true;
            CHECK(result.completion_round >= 1);
        }
    }
    CHECK(saw_non_termination);
    CHECK(saw_completion);
}

TEST_CASE("run-level invariants on random instances, both protocols") {
    for (const auto kind : {ProtocolKind::Saer, ProtocolKind::Raes}) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto g = generate_regular(48, 6, seed);
            Simulation sim(g, kind, 2, 2, seed * 31 + 1);
            const auto cap = 2ULL * 2ULL;
            std::uint64_t prev_alive = sim.alive_balls();
            std::uint64_t prev_burned = 0;
            std::uint64_t prev_round = 0;
            while (!sim.complete() && sim.round() < 40) {
                const auto rec = sim.step();
                CHECK(rec.round == prev_round + 1);
                prev_round = rec.round;
                CHECK(rec.requests_sent == prev_alive);
                CHECK(rec.alive_after == prev_alive - rec.accepted);
                CHECK(rec.messages == 2 * rec.requests_sent);
                CHECK(rec.burned_servers >= prev_burned);
                if (kind == ProtocolKind::Raes) CHECK(rec.burned_servers == 0);
                CHECK(total_accepted(sim) == total_load(sim));
                for (const auto& sv : sim.servers()) {
                    CHECK(sv.accepted_load <= cap);
                    CHECK(sv.accepted_load <= sv.cumulative_received);
                    if (kind == ProtocolKind::Saer && sv.burned)
                        CHECK(sv.cumulative_received > cap);
                }
                prev_alive = rec.alive_after;
                prev_burned = rec.burned_servers;
            }
        }
    }
}

TEST_CASE("servers accept all of a round's batch or none of it") {
    const auto g = generate_regular(40, 5, 9);
    Simulation sim(g, ProtocolKind::Saer, 1, 2, 17);
    while (!sim.complete() && sim.round() < 30) {
        const auto batch = sim.phase1();
        std::vector<std::uint32_t> before(g.size());
        for (std::uint32_t v = 0; v < g.size(); ++v)
            before[v] = sim.clients()[v].accepted_count;
        const auto summary = sim.phase2(batch);

        // accepted total is exactly the receipt count of the accepting servers
        std::uint64_t expected = 0;
        for (std::uint32_t u = 0; u < g.size(); ++u)
            if (summary.server_accepted[u]) expected += batch.per_server_requests[u];
        CHECK(summary.accepted_balls == expected);

        // and each client is credited one ball per request that landed on one
        std::vector<std::uint32_t> credit(g.size(), 0);
        for (const auto& req : batch.requests)
            if (summary.server_accepted[req.server]) credit[req.client]++;
        for (std::uint32_t v = 0; v < g.size(); ++v)
            CHECK(sim.clients()[v].accepted_count == before[v] + credit[v]);
    }
}

TEST_CASE("identical inputs give bit-identical results") {
    const auto g = generate_regular(64, 8, 21);
    Simulation a(g, ProtocolKind::Saer, 2, 2, 5);
    Simulation b(g, ProtocolKind::Saer, 2, 2, 5);
    const auto ra = a.run_to_completion(40);
    const auto rb = b.run_to_completion(40);
    CHECK(ra == rb);

    Simulation c(g, ProtocolKind::Saer, 2, 2, 6);
    const auto rc = c.run_to_completion(40);
    CHECK_FALSE(ra == rc);
}

TEST_CASE("default horizon formula") {
    CHECK(Simulation::default_max_rounds(4096) == 94);
    CHECK(Simulation::default_max_rounds(2) == 17);
}

TEST_CASE("completed runs never exceed the load cap") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto g = generate_regular(128, 16, seed);
        Simulation sim(g, ProtocolKind::Saer, 4, 1, seed);
        const auto result = sim.run_to_completion(Simulation::default_max_rounds(128));
        if (!result.non_terminated) CHECK(result.max_load <= 4);
    }
}

TEST_CASE("K22 with c=2, d=1: all four draw pairs accept in round one") {
    const auto g = k22();
    for (std::uint32_t u0 = 0; u0 < 2; ++u0) {
        for (std::uint32_t u1 = 0; u1 < 2; ++u1) {
            Simulation sim(g, ProtocolKind::Saer, 2, 1, 0);
            RequestBatch batch;
            batch.requests = {{0, u0, 0}, {1, u1, 0}};
            batch.per_server_requests.assign(2, 0);
            batch.per_server_requests[u0]++;
            batch.per_server_requests[u1]++;
            const auto summary = sim.phase2(batch);
            CHECK(summary.accepted_balls == 2);
            CHECK(sim.complete());
            CHECK(sim.burned_count() == 0);
        }
    }
}

TEST_CASE("burning both tiny servers forces non-termination deterministically") {
    const auto g = k22();
    Simulation sim(g, ProtocolKind::Saer, 1, 1, 0);  // threshold c*d = 1
    for (std::uint32_t u = 0; u < 2; ++u) {
        RequestBatch batch;
        batch.requests = {{0, u, 0}, {1, u, 0}};  // both clients hit server u
        batch.per_server_requests.assign(2, 0);
        batch.per_server_requests[u] = 2;
        const auto summary = sim.phase2(batch);
        CHECK(summary.accepted_balls == 0);
        CHECK(sim.servers()[u].burned);
    }
    CHECK(sim.alive_balls() == 2);
    const auto result = sim.run_to_completion(30);
    CHECK(result.non_terminated);
    CHECK(result.completion_round == RunResult::kNonTerminated);
}
