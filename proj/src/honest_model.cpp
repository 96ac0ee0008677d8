#include "qrx/honest_model.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "qrx/stats.hpp"

namespace qrx {

void HonestDeviceModel::validate() const {
    if (!(eta_eff > 0.0 && eta_eff <= 1.0))
        throw std::invalid_argument("honest model: eta_eff outside (0,1]");
    if (lo_phases.empty())
        throw std::invalid_argument("honest model: no LO phases");
}

double HonestDeviceModel::quadrature_mean(std::size_t ix, std::size_t y) const {
    const cdouble a = constellation.amplitudes()[ix];
    const cdouble rot = a * std::exp(cdouble(0.0, -lo_phases[y]));
    return 2.0 * std::sqrt(eta_eff) * rot.real();
}

void ConditionalDistribution::validate() const {
    if (nx == 0 || ny == 0 || p0.size() != nx * ny)
        throw std::invalid_argument("distribution: inconsistent table size");
    for (double v : p0)
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("distribution: probability outside [0,1]");
    // complement rows sum to 1 by construction; tolerance check kept for loads
    for (std::size_t i = 0; i < p0.size(); ++i)
        if (std::abs(p0[i] + (1.0 - p0[i]) - 1.0) > 1e-12)
            throw std::invalid_argument("distribution: row does not sum to 1");
}

double equivalent_electronic_efficiency(double clearance_db) {
    if (!(clearance_db > 0.0))
        throw std::domain_error("equivalent_electronic_efficiency: clearance must be > 0 dB");
    return 1.0 - std::pow(10.0, -clearance_db / 10.0);
}

double effective_efficiency(double pd_eff_avg, double bs_loss_db, double clearance_db,
                            double extra_loss_db) {
    if (!(pd_eff_avg > 0.0 && pd_eff_avg <= 1.0))
        throw std::domain_error("effective_efficiency: pd efficiency outside (0,1]");
    if (bs_loss_db < 0.0 || extra_loss_db < 0.0)
        throw std::domain_error("effective_efficiency: negative loss");
    return pd_eff_avg * std::pow(10.0, -bs_loss_db / 10.0) *
           equivalent_electronic_efficiency(clearance_db) *
           std::pow(10.0, -extra_loss_db / 10.0);
}

ConditionalDistribution expected_distribution(const HonestDeviceModel& m) {
    m.validate();
    ConditionalDistribution d;
    d.nx = m.constellation.size();
    d.ny = m.lo_phases.size();
    d.p0.resize(d.nx * d.ny);
    for (std::size_t ix = 0; ix < d.nx; ++ix)
        for (std::size_t y = 0; y < d.ny; ++y)
            d.p0[ix * d.ny + y] = normal_cdf(m.quadrature_mean(ix, y));
    return d;
}

int sample_round(const HonestDeviceModel& m, std::uint32_t x, std::uint32_t y,
                 NormalSampler& rng) {
    const std::size_t ix = m.constellation.index_of(x);
    if (y >= m.lo_phases.size())
        throw std::out_of_range("sample_round: unknown setting y");
    const double q = m.quadrature_mean(ix, y) + rng.next();
    return q > 0.0 ? 0 : 1;
}

double winning_probability(const ConditionalDistribution& p, const GameSpec& g) {
    if (g.nx > p.nx || g.ny > p.ny)
        throw std::invalid_argument("winning_probability: game labels outside distribution domain");
    double w = 0.0;
    for (std::size_t x = 0; x < g.nx; ++x)
        for (std::size_t y = 0; y < g.ny; ++y) {
            const double qx = g.q_at(x, y);
            if (qx == 0.0) continue;
            w += qx * p.p(g.win_at(x, y), x, y);
        }
    return w;
}

std::string ConditionalDistribution::to_table_text() const {
    std::ostringstream os;
    os << "setting";
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) os << "  x=" << x << ",y=" << y;
    os << "\n";
    for (int b = 0; b < 2; ++b) {
        os << "P(b=" << b << "|x,y)";
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t y = 0; y < ny; ++y)
                os << "  " << std::setprecision(17) << p(b, x, y);
        os << "\n";
    }
    return os.str();
}

ConditionalDistribution ConditionalDistribution::from_table_text(const std::string& text) {
    std::istringstream is(text);
    std::string header;
    if (!std::getline(is, header)) throw std::runtime_error("distribution table: empty");
    // count columns from the header
    std::size_t nx = 0, ny = 0;
    {
        std::istringstream hs(header);
        std::string tok;
        hs >> tok;  // "setting"
        while (hs >> tok) {
            std::size_t x = 0, y = 0;
            if (std::sscanf(tok.c_str(), "x=%zu,y=%zu", &x, &y) != 2)
                throw std::runtime_error("distribution table: bad header token " + tok);
            nx = std::max(nx, x + 1);
            ny = std::max(ny, y + 1);
        }
    }
    ConditionalDistribution d;
    d.nx = nx;
    d.ny = ny;
    d.p0.assign(nx * ny, 0.0);
    std::string row;
    if (!std::getline(is, row)) throw std::runtime_error("distribution table: missing b=0 row");
    std::istringstream rs(row);
    std::string tok;
    rs >> tok;
    for (std::size_t i = 0; i < nx * ny; ++i)
        if (!(rs >> d.p0[i])) throw std::runtime_error("distribution table: short b=0 row");
    d.validate();
    return d;
}

}  // namespace qrx
