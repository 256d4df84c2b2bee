#include "saer/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace saer {

double alpha_for(std::uint32_t c, double ratio) {
    if (c == 0) throw std::invalid_argument("c must be at least 1");
    if (ratio < 1) throw std::invalid_argument("ratio must be at least 1");
    if (2.0 * ratio / c > 0.25)
        throw std::invalid_argument("c too small for envelope (need c >= 8 * ratio)");
    return std::sqrt(static_cast<double>(c) / (2.0 * ratio));
}

std::vector<double> gamma_sequence(std::uint32_t c, double ratio, std::size_t t_max) {
    alpha_for(c, ratio);  // validates the precondition
    const double rate = 2.0 * ratio / static_cast<double>(c);
    std::vector<double> gamma(t_max + 1);
    gamma[0] = 1.0;
    double product = 1.0;  // prod_{j<=t} gamma_j, carried incrementally
    for (std::size_t t = 0; t < t_max; ++t) {
        product *= gamma[t];
        gamma[t + 1] = (t == 0 ? 0.0 : gamma[t]) + rate * product;
    }
    return gamma;
}

std::uint64_t stage1_horizon(std::uint32_t d, std::uint32_t delta_max_s, double log_n,
                             std::span<const double> gamma) {
    const double bound = 12.0 * log_n;
    double product = 1.0;  // prod_{j<T} gamma_j; empty product for T = 1 is gamma_0 = 1
    for (std::uint64_t t = 1;; ++t) {
        if (static_cast<double>(d) * delta_max_s * product <= bound) return t;
        if (t >= gamma.size())
            throw std::invalid_argument("gamma sequence too short for stage-1 horizon scan");
        product *= gamma[t];
    }
}

std::vector<double> delta_sequence(std::uint32_t c, std::uint32_t d, std::uint32_t delta_min_c,
                                   double log_n, std::size_t t_max) {
    const double slope =
        24.0 * log_n / (static_cast<double>(c) * d * static_cast<double>(delta_min_c));
    std::vector<double> seq(t_max + 1);
    for (std::size_t t = 0; t <= t_max; ++t) seq[t] = 0.25 + slope * static_cast<double>(t);
    return seq;
}

std::uint32_t recommended_c(double eta, double rho, std::uint32_t d) {
    if (eta <= 0) throw std::invalid_argument("eta must be positive");
    if (rho < 1) throw std::invalid_argument("rho must be at least 1");
    if (d == 0) throw std::invalid_argument("d must be at least 1");
    const double need = std::max(32.0 * rho, 288.0 / (eta * static_cast<double>(d)));
    return static_cast<std::uint32_t>(std::ceil(need));
}

TheoryEnvelope envelope(const TheoryParams& params) {
    if (params.n < 2) throw std::invalid_argument("n must be at least 2");
    if (params.d == 0) throw std::invalid_argument("d must be at least 1");
    if (params.delta_min_c == 0 || params.delta_max_s < params.delta_min_c)
        throw std::invalid_argument("degree pair must satisfy delta_max_s >= delta_min_c >= 1");

    TheoryEnvelope env;
    const double ratio = params.ratio();
    env.alpha = alpha_for(params.c, ratio);
    env.recommended_c = recommended_c(params.eta, params.rho, params.d);

    const double log_n = std::log(static_cast<double>(params.n));
    env.completion_bound = static_cast<std::uint64_t>(std::floor(3.0 * log_n));

    // Grow gamma until the horizon condition is met, then extend through the
    // completion bound for display.
    std::size_t t_max = 16;
    for (;;) {
        env.gamma = gamma_sequence(params.c, ratio, t_max);
        try {
            env.stage1_horizon = stage1_horizon(params.d, params.delta_max_s, log_n, env.gamma);
            break;
        } catch (const std::invalid_argument&) {
            if (t_max > 65536) throw;
            t_max *= 2;
        }
    }
    const std::size_t span = std::max<std::size_t>(env.stage1_horizon, env.completion_bound);
    if (env.gamma.size() <= span) env.gamma = gamma_sequence(params.c, ratio, span);
    env.products.resize(env.gamma.size());
    env.products[0] = 1.0;
    for (std::size_t t = 1; t < env.gamma.size(); ++t)
        env.products[t] = env.products[t - 1] * env.gamma[t - 1];

    const double dds = static_cast<double>(params.d) * params.delta_max_s / (12.0 * log_n);
    env.stage1_cap = dds > 1.0 ? 0.5 * std::log(dds) : 0.0;
    env.delta_seq =
        delta_sequence(params.c, params.d, params.delta_min_c, log_n, env.completion_bound);
    return env;
}

}  // namespace saer
