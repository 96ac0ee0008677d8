#pragma once

#include <vector>

namespace qrx {

/// Standard normal CDF via erfc (relative error below 1e-15 over the range used).
double normal_cdf(double z);

/// Binary entropy in bits; h2(0) = h2(1) = 0.
double binary_entropy(double p);

/// Shannon entropy in bits of a probability vector (zeros contribute nothing).
double shannon_entropy(const std::vector<double>& p);

/// KL divergence D(q||p) between Bernoulli parameters, in nats.
/// Clamped at 0 against rounding for q ~ p.
double kl_bernoulli_nats(double q, double p);

/// Normal-approximation bracket for the binomial CDF:
/// F(n,p,k) = Phi(sign(k/n - p) * sqrt(2 n D(k/n, p))) satisfies
/// F(n,p,k) <= Pr[Bin(n,p) <= k] <= F(n,p,k+1).
double binomial_cdf_bracket(double n, double p, double k);

}  // namespace qrx
