#pragma once

#include <string>
#include <vector>

#include "qrx/constellation.hpp"
#include "qrx/game_spec.hpp"
#include "qrx/random_stream.hpp"

namespace qrx {

/// Honest implementation: homodyne detection with effective efficiency
/// eta_eff, LO phase phi_y per measurement setting, outcome b = 0 for a
/// positive quadrature sample (ties map to b = 1).
struct HonestDeviceModel {
    Constellation constellation;
    std::vector<double> lo_phases;  // indexed by setting y
    double eta_eff = 1.0;

    static std::vector<double> default_lo_phases() { return {M_PI / 2.0, 0.0}; }

    void validate() const;
    /// Quadrature mean 2 sqrt(eta) Re(alpha_x e^{-i phi_y}) for symbol index ix.
    double quadrature_mean(std::size_t ix, std::size_t y) const;
};

/// Outcome probabilities P[b][x][y]; rows over b sum to 1.
struct ConditionalDistribution {
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<double> p0;  // P(b=0 | x,y), row-major [x*ny + y]

    double p(int b, std::size_t x, std::size_t y) const {
        const double v = p0[x * ny + y];
        return b == 0 ? v : 1.0 - v;
    }
    void validate() const;

    std::string to_table_text() const;
    static ConditionalDistribution from_table_text(const std::string& text);
};

/// Electronic-noise-equivalent efficiency 1 - 10^(-clearance_dB/10).
double equivalent_electronic_efficiency(double clearance_db);

/// Multiplicative detector budget:
/// pd_eff_avg * 10^(-bs_loss/10) * eta_elec(clearance) * 10^(-extra_loss/10).
double effective_efficiency(double pd_eff_avg, double bs_loss_db, double clearance_db,
                            double extra_loss_db);

/// P(b=0|x,y) = Phi(quadrature mean) under the unit-variance Gaussian model.
ConditionalDistribution expected_distribution(const HonestDeviceModel& m);

/// One simulated outcome: q ~ Normal(mean, 1), b = 0 iff q > 0.
int sample_round(const HonestDeviceModel& m, std::uint32_t x, std::uint32_t y,
                 NormalSampler& rng);

/// sum_xy q(x,y) P(b_xy | x,y).
double winning_probability(const ConditionalDistribution& p, const GameSpec& g);

}  // namespace qrx
