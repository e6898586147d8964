#pragma once

#include <cstddef>

namespace nbcs {

/// log(n choose k), exact summation for small k and log-gamma otherwise.
double log_binomial(std::size_t n, std::size_t k);

/// Margin bound for a hybrid (k, gamma) sample-compression learner:
///
///   hinge_sum / n + 4 / (|w| sqrt(n-k)) + sqrt(log log2(2/|w|) / (n-k))
///       + sqrt(log(2 (n choose k) / delta) / (2 (n-k)))
///
/// Requires n > k, 0 < delta < 1, 0 < |w| <= 1 and hinge_sum >= 0.
double margin_bound(std::size_t n, std::size_t k, double w_norm, double hinge_sum, double delta);

/// Hybrid (k, d) VC sample-compression bound with c = 144:
///
///   err_hat + c sqrt(d / (n-k)) + sqrt(log((n choose k) / delta) / (2 (n-k)))
double vc_compression_bound(std::size_t n, std::size_t k, std::size_t d, double err_hat,
                            double delta);

inline constexpr double kVcConstant = 144.0;

}  // namespace nbcs
