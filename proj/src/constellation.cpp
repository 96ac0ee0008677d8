#include "qrx/constellation.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace qrx {

Constellation::Constellation(std::vector<std::uint32_t> labels, std::vector<cdouble> amplitudes)
    : labels_(std::move(labels)), amplitudes_(std::move(amplitudes)) {
    if (labels_.empty() || labels_.size() != amplitudes_.size())
        throw std::invalid_argument("constellation: need matching, non-empty labels and amplitudes");
    std::set<std::uint32_t> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size())
        throw std::invalid_argument("constellation: duplicate symbol labels");
}

Constellation Constellation::qpsk(double alpha) {
    std::vector<std::uint32_t> labels{0, 1, 2, 3};
    std::vector<cdouble> amps;
    for (int x = 0; x < 4; ++x) {
        const double ph = x * M_PI / 2.0;
        amps.emplace_back(alpha * std::cos(ph), alpha * std::sin(ph));
    }
    return Constellation(std::move(labels), std::move(amps));
}

Constellation Constellation::qam16(double corner_amplitude) {
    // grid coordinates {-1,-1/3,1/3,1} scaled so the corner has the given amplitude
    const double s = corner_amplitude / std::sqrt(2.0);
    const double lv[4] = {-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0};
    std::vector<std::uint32_t> labels;
    std::vector<cdouble> amps;
    for (int row = 0; row < 4; ++row) {
        for (int col = 0; col < 4; ++col) {
            labels.push_back(std::uint32_t(4 * row + col));
            amps.emplace_back(s * lv[col], s * lv[3 - row]);
        }
    }
    return Constellation(std::move(labels), std::move(amps));
}

std::size_t Constellation::index_of(std::uint32_t label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
        if (labels_[i] == label) return i;
    throw std::out_of_range("constellation: unknown symbol label " + std::to_string(label));
}

cdouble coherent_overlap(cdouble a, cdouble b) {
    return std::exp(-(std::norm(a) + std::norm(b)) / 2.0 + std::conj(a) * b);
}

cdouble overlap(std::uint32_t x, std::uint32_t x2, const Constellation& c) {
    return coherent_overlap(c.amplitude(x), c.amplitude(x2));
}

GramMatrix gram_matrix(const Constellation& c) {
    const auto n = Eigen::Index(c.size());
    GramMatrix g{Eigen::MatrixXcd(n, n)};
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            g.entries(i, j) = coherent_overlap(c.amplitudes()[std::size_t(i)],
                                               c.amplitudes()[std::size_t(j)]);
    return g;
}

double GramMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(entries, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

void GramMatrix::validate() const {
    if (entries.rows() != entries.cols() || entries.rows() == 0)
        throw std::invalid_argument("gram matrix: not square");
    for (Eigen::Index i = 0; i < entries.rows(); ++i) {
        if (std::abs(entries(i, i) - cdouble(1.0, 0.0)) > 1e-12)
            throw std::invalid_argument("gram matrix: diagonal not 1");
        for (Eigen::Index j = 0; j < entries.cols(); ++j)
            if (std::abs(entries(i, j) - std::conj(entries(j, i))) > 1e-12)
                throw std::invalid_argument("gram matrix: not hermitian");
    }
    if (min_eigenvalue() < -1e-10)
        throw std::invalid_argument("gram matrix: not positive semidefinite");
}

cdouble two_mode_combine(cdouble ae, cdouble al) {
    const double mag = std::sqrt(std::norm(ae) + std::norm(al));
    if (mag == 0.0) return {0.0, 0.0};
    const cdouble diff = ae - al;
    const double dn = std::abs(diff);
    if (dn > 0.0) return mag * diff / dn;
    // degenerate in-phase pair: fall back to the common phase
    const double an = std::abs(ae);
    return an > 0.0 ? mag * ae / an : cdouble(mag, 0.0);
}

std::pair<cdouble, cdouble> two_mode_coefficients(cdouble ae, cdouble al) {
    const double mag = std::sqrt(std::norm(ae) + std::norm(al));
    if (mag == 0.0) return {cdouble(0.0), cdouble(0.0)};
    return {ae / mag, al / mag};
}

double two_mode_quadrature(double qe, double ql) {
    return (qe - ql) / std::sqrt(2.0);
}

}  // namespace qrx
