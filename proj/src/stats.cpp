#include "qrx/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace qrx {

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double binary_entropy(double p) {
    if (p < 0.0 || p > 1.0) throw std::domain_error("binary_entropy: p outside [0,1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double shannon_entropy(const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p) {
        if (v < 0.0) throw std::domain_error("shannon_entropy: negative probability");
        if (v > 0.0) h -= v * std::log2(v);
    }
    return h;
}

double kl_bernoulli_nats(double q, double p) {
    if (p <= 0.0 || p >= 1.0) throw std::domain_error("kl_bernoulli_nats: p outside (0,1)");
    if (q < 0.0 || q > 1.0) throw std::domain_error("kl_bernoulli_nats: q outside [0,1]");
    double t = 0.0;
    if (q > 0.0) t += q * std::log(q / p);
    if (q < 1.0) t += (1.0 - q) * std::log((1.0 - q) / (1.0 - p));
    return t < 0.0 ? 0.0 : t;
}

double binomial_cdf_bracket(double n, double p, double k) {
    if (n <= 0.0) throw std::domain_error("binomial_cdf_bracket: n <= 0");
    if (p <= 0.0 || p >= 1.0) throw std::domain_error("binomial_cdf_bracket: p outside (0,1)");
    if (k < 0.0 || k > n) throw std::domain_error("binomial_cdf_bracket: k outside [0,n]");
    const double q = k / n;
    const double d = kl_bernoulli_nats(q, p);
    const double s = q > p ? 1.0 : (q < p ? -1.0 : 0.0);
    return normal_cdf(s * std::sqrt(2.0 * n * d));
}

}  // namespace qrx
