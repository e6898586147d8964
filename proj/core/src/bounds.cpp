#include "nbcs/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nbcs/error.hpp"

namespace nbcs {

namespace {

void check_common(std::size_t n, std::size_t k, double delta) {
    if (n <= k) throw DomainError("bound requires n > k (n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("bound requires 0 < delta < 1");
}

}  // namespace

double log_binomial(std::size_t n, std::size_t k) {
    if (k > n) throw DomainError("log_binomial requires k <= n");
    const std::size_t m = std::min(k, n - k);
    if (m <= 4096) {
        double s = 0.0;
        for (std::size_t i = 1; i <= m; ++i)
            s += std::log(static_cast<double>(n - m + i) / static_cast<double>(i));
        return s;
    }
    const double nn = static_cast<double>(n);
    const double kk = static_cast<double>(m);
    return std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0);
}

double margin_bound(std::size_t n, std::size_t k, double w_norm, double hinge_sum, double delta) {
    check_common(n, k, delta);
    if (!(w_norm > 0.0 && w_norm <= 1.0))
        throw DomainError("margin_bound: log log2(2/|w|) term requires 0 < |w| <= 1");
    if (!(hinge_sum >= 0.0)) throw DomainError("margin_bound: hinge term requires hinge_sum >= 0");
    const double m = static_cast<double>(n - k);
    const double empirical = hinge_sum / static_cast<double>(n);
    const double margin_term = 4.0 / (w_norm * std::sqrt(m));
    const double stratification = std::sqrt(std::log(std::log2(2.0 / w_norm)) / m);
    const double confidence =
        std::sqrt((std::log(2.0) + log_binomial(n, k) - std::log(delta)) / (2.0 * m));
    return empirical + margin_term + stratification + confidence;
}

double vc_compression_bound(std::size_t n, std::size_t k, std::size_t d, double err_hat,
                            double delta) {
    check_common(n, k, delta);
    if (!(err_hat >= 0.0 && err_hat <= 1.0))
        throw DomainError("vc_compression_bound: err_hat must lie in [0, 1]");
    const double m = static_cast<double>(n - k);
    return err_hat + kVcConstant * std::sqrt(static_cast<double>(d) / m) +
           std::sqrt((log_binomial(n, k) - std::log(delta)) / (2.0 * m));
}

}  // namespace nbcs
