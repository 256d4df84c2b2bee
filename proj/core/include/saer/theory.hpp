#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace saer {

/// Inputs for the analytic envelopes. The regular case is delta_max_s ==
/// delta_min_c == Delta; the almost-regular envelopes use the actual pair.
struct TheoryParams {
    std::uint32_t n = 0;
    std::uint32_t d = 1;
    std::uint32_t c = 0;
    double eta = 1.0;
    double rho = 1.0;
    std::uint32_t delta_min_c = 0;
    std::uint32_t delta_max_s = 0;

    double ratio() const noexcept {
        return static_cast<double>(delta_max_s) / static_cast<double>(delta_min_c);
    }
};

/// The gamma/delta envelope sequences together with the horizons they bound.
///
///   gamma_0 = 1,  gamma_{t+1} = gamma_t + (2 ratio / c) * prod_{j<=t} gamma_j
///   products[t] = prod_{j<t} gamma_j           (products[0] = 1)
///   delta_seq[t] = 1/4 + 24 t ln(n) / (c d delta_min_c)
///
/// stage1_horizon T is the smallest t >= 1 with d * delta_max_s * products[t]
/// <= 12 ln(n); completion_bound is floor(3 ln n).
struct TheoryEnvelope {
    double alpha = 0.0;
    std::vector<double> gamma;
    std::vector<double> products;
    std::uint64_t stage1_horizon = 0;
    double stage1_cap = 0.0;  // (1/2) ln(d * delta_max_s / (12 ln n)), display only
    std::vector<double> delta_seq;
    std::uint64_t completion_bound = 0;
    std::uint32_t recommended_c = 0;
};

/// Largest alpha with 2 ratio / c <= 1 / alpha^2. Throws when alpha < 2,
/// i.e. when c < 8 ratio and no valid envelope exists.
double alpha_for(std::uint32_t c, double ratio);

/// gamma_0..gamma_t_max via the incremental recurrence. ratio = 1 gives the
/// regular-case sequence, ratio > 1 the almost-regular one.
std::vector<double> gamma_sequence(std::uint32_t c, double ratio, std::size_t t_max);

/// Smallest T >= 1 with d * delta_max_s * prod_{j<T} gamma_j <= 12 * log_n,
/// found by direct scan of the product condition.
std::uint64_t stage1_horizon(std::uint32_t d, std::uint32_t delta_max_s, double log_n,
                             std::span<const double> gamma);

/// delta_seq[0..t_max]; affine in t with slope 24 log_n / (c d delta_min_c).
std::vector<double> delta_sequence(std::uint32_t c, std::uint32_t d, std::uint32_t delta_min_c,
                                   double log_n, std::size_t t_max);

/// Smallest integer >= max(32 rho, 288 / (eta d)).
std::uint32_t recommended_c(double eta, double rho, std::uint32_t d);

TheoryEnvelope envelope(const TheoryParams& params);

}  // namespace saer
