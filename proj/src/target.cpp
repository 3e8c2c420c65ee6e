#include "difflab/target.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "difflab/stats.hpp"

namespace difflab {

std::string to_string(TargetKind kind) {
    switch (kind) {
        case TargetKind::TwoDeltas: return "two_deltas";
        case TargetKind::Discrete: return "discrete";
        case TargetKind::Hypersphere: return "hypersphere";
        case TargetKind::DiffusedIsing: return "diffused_ising";
    }
    return "unknown";
}

namespace {

constexpr int kIsingMaxDim = 24;        // 2^24 states is the enumerability bound
constexpr int kIsingMaterializeDim = 16; // materialize atom matrix up to 8.4 MB

} // namespace

void Target::finalize_enumerable() {
    // normalize so that logsumexp(log_weights) == 0
    std::vector<double> lw(log_weights_.data(), log_weights_.data() + log_weights_.size());
    const double lse = log_sum_exp(lw);
    log_weights_.array() -= lse;

    const auto n = log_weights_.size();
    cumulative_.resize(n);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        acc += std::exp(log_weights_[j]);
        cumulative_[j] = acc;
    }
    cumulative_[n - 1] = 1.0;

    mean_ = Eigen::VectorXd::Zero(dim_);
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(dim_, dim_);
    for_each_atom([&](const double* y, double logw) {
        const double p = std::exp(logw);
        Eigen::Map<const Eigen::VectorXd> v(y, dim_);
        mean_.noalias() += p * v;
        second.noalias() += p * v * v.transpose();
    });
    covariance_ = second - mean_ * mean_.transpose();
    covariance_ = 0.5 * (covariance_ + covariance_.transpose().eval());
}

Target Target::two_deltas() {
    Target t;
    t.kind_ = TargetKind::TwoDeltas;
    t.dim_ = 1;
    t.constant_norm_ = true;
    t.points_.resize(2, 1);
    t.points_(0, 0) = -1.0;
    t.points_(1, 0) = 1.0;
    t.log_weights_ = Eigen::VectorXd::Constant(2, std::log(0.5));
    t.finalize_enumerable();
    return t;
}

Target Target::discrete(RowMatrixXd points, Eigen::VectorXd weights) {
    require(points.rows() >= 1 && points.cols() >= 1, Errc::invalid_argument,
            "discrete target needs at least one point");
    const auto n = points.rows();
    if (weights.size() == 0)
        weights = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    require(weights.size() == n, Errc::bad_weights, "one weight per point required");
    for (Eigen::Index j = 0; j < n; ++j)
        require(weights[j] > 0.0, Errc::bad_weights, "weights must be positive");
    const double sum = weights.sum();
    require(std::fabs(sum - 1.0) < 1e-9, Errc::bad_weights,
            "weights must sum to 1 within 1e-9 (got " + std::to_string(sum) + ")");

    Target t;
    t.kind_ = TargetKind::Discrete;
    t.dim_ = static_cast<int>(points.cols());
    t.points_ = std::move(points);
    t.log_weights_ = (weights.array() / sum).log().matrix();

    const double ref = t.points_.row(0).norm();
    t.constant_norm_ = true;
    for (Eigen::Index j = 0; j < n; ++j) {
        require(t.points_.row(j).allFinite(), Errc::invalid_argument, "non-finite point");
        if (std::fabs(t.points_.row(j).norm() - ref) > 1e-9 * std::max(1.0, ref))
            t.constant_norm_ = false;
    }
    t.finalize_enumerable();
    return t;
}

Target Target::hypersphere(int dim, double radius) {
    require(dim >= 1, Errc::invalid_argument, "hypersphere dim must be >= 1");
    require(radius > 0.0, Errc::invalid_argument, "hypersphere radius must be > 0");
    Target t;
    t.kind_ = TargetKind::Hypersphere;
    t.dim_ = dim;
    t.radius_ = radius;
    t.constant_norm_ = true;
    t.mean_ = Eigen::VectorXd::Zero(dim);
    t.covariance_ = (radius * radius / dim) * Eigen::MatrixXd::Identity(dim, dim);
    return t;
}

Target Target::diffused_ising(Eigen::MatrixXd coupling, double temperature) {
    const auto d = coupling.rows();
    require(d >= 1 && coupling.cols() == d, Errc::invalid_argument, "coupling must be square");
    require(d <= kIsingMaxDim, Errc::dimension_too_large,
            "diffused Ising limited to d <= 24 (exhaustive enumeration)");
    require(temperature > 0.0, Errc::invalid_argument, "Ising temperature must be > 0");
    for (Eigen::Index j = 0; j < d; ++j) {
        require(coupling(j, j) == 0.0, Errc::non_symmetric_coupling, "coupling diagonal must be zero");
        for (Eigen::Index k = j + 1; k < d; ++k)
            require(std::fabs(coupling(j, k) - coupling(k, j)) <= 1e-12,
                    Errc::non_symmetric_coupling, "coupling matrix must be symmetric");
    }

    Target t;
    t.kind_ = TargetKind::DiffusedIsing;
    t.dim_ = static_cast<int>(d);
    t.constant_norm_ = true;
    t.coupling_ = std::move(coupling);
    t.ising_temperature_ = temperature;

    // log phi(y) = -q/(2T) with q = y^T W y, walked in Gray-code order so the
    // quadratic form updates in O(d) per state.
    const std::uint64_t n = std::uint64_t{1} << d;
    t.log_weights_.resize(static_cast<Eigen::Index>(n));
    Eigen::VectorXd y = Eigen::VectorXd::Constant(d, -1.0);
    Eigen::VectorXd wy = t.coupling_ * y;
    double q = y.dot(wy);
    std::uint64_t gray = 0;
    t.log_weights_[0] = -q / (2.0 * temperature);
    for (std::uint64_t i = 1; i < n; ++i) {
        const int bit = std::countr_zero(i);
        const double delta = -2.0 * y[bit];
        q += 2.0 * delta * wy[bit]; // W has zero diagonal
        wy.noalias() += delta * t.coupling_.col(bit);
        y[bit] += delta;
        gray ^= std::uint64_t{1} << bit;
        t.log_weights_[static_cast<Eigen::Index>(gray)] = -q / (2.0 * temperature);
    }

    if (d <= kIsingMaterializeDim) {
        t.points_.resize(static_cast<Eigen::Index>(n), d);
        for (std::uint64_t idx = 0; idx < n; ++idx)
            for (Eigen::Index k = 0; k < d; ++k)
                t.points_(static_cast<Eigen::Index>(idx), k) = (idx >> k) & 1u ? 1.0 : -1.0;
    }

    t.finalize_enumerable();
    return t;
}

double Target::support_norm() const {
    require(constant_norm_, Errc::non_constant_norm, "target support norm is not constant");
    switch (kind_) {
        case TargetKind::TwoDeltas: return 1.0;
        case TargetKind::Hypersphere: return radius_;
        case TargetKind::DiffusedIsing: return std::sqrt(static_cast<double>(dim_));
        case TargetKind::Discrete: return points_.row(0).norm();
    }
    return 0.0;
}

std::size_t Target::atom_count() const {
    require(enumerable(), Errc::continuous_support, "hypersphere support is continuous");
    if (kind_ == TargetKind::DiffusedIsing) return std::size_t{1} << dim_;
    return static_cast<std::size_t>(points_.rows());
}

std::vector<SupportAtom> Target::enumerate_support() const {
    require(enumerable(), Errc::continuous_support,
            "enumerate_support: hypersphere support is continuous");
    std::vector<SupportAtom> atoms;
    atoms.reserve(atom_count());
    for_each_atom([&](const double* y, double logw) {
        atoms.push_back({Eigen::Map<const Eigen::VectorXd>(y, dim_), logw});
    });
    return atoms;
}

double Target::atom_log_weight(const Eigen::VectorXd& y) const {
    require(enumerable(), Errc::continuous_support, "hypersphere support is continuous");
    require(y.size() == dim_, Errc::invalid_argument, "dimension mismatch");
    if (kind_ == TargetKind::DiffusedIsing) {
        std::uint64_t idx = 0;
        for (int k = 0; k < dim_; ++k) {
            if (std::fabs(std::fabs(y[k]) - 1.0) > 1e-9)
                fail(Errc::off_support, "point entries must be +-1");
            if (y[k] > 0.0) idx |= std::uint64_t{1} << k;
        }
        return log_weights_[static_cast<Eigen::Index>(idx)];
    }
    for (Eigen::Index j = 0; j < points_.rows(); ++j)
        if ((points_.row(j).transpose() - y).lpNorm<Eigen::Infinity>() <= 1e-9)
            return log_weights_[j];
    fail(Errc::off_support, "point is not a support atom");
}

Eigen::VectorXd Target::sample(RngStream& rng) const {
    if (kind_ == TargetKind::Hypersphere) {
        Eigen::VectorXd g(dim_);
        double norm = 0.0;
        do {
            for (int k = 0; k < dim_; ++k) g[k] = rng.gaussian();
            norm = g.norm();
        } while (norm == 0.0);
        return (radius_ / norm) * g;
    }
    const double u = rng.uniform();
    const auto it = std::upper_bound(cumulative_.data(),
                                     cumulative_.data() + cumulative_.size(), u);
    auto idx = static_cast<Eigen::Index>(it - cumulative_.data());
    if (idx >= cumulative_.size()) idx = cumulative_.size() - 1;
    if (kind_ == TargetKind::DiffusedIsing) {
        Eigen::VectorXd y(dim_);
        for (int k = 0; k < dim_; ++k)
            y[k] = (static_cast<std::uint64_t>(idx) >> k) & 1u ? 1.0 : -1.0;
        return y;
    }
    return points_.row(idx).transpose();
}

RowMatrixXd Target::sample_many(int n, RngStream& rng) const {
    require(n >= 1, Errc::invalid_argument, "sample_many: n >= 1");
    RowMatrixXd out(n, dim_);
    for (int i = 0; i < n; ++i) out.row(i) = sample(rng).transpose();
    return out;
}

double Target::support_diameter() const {
    switch (kind_) {
        case TargetKind::TwoDeltas: return 2.0;
        case TargetKind::Hypersphere: return 2.0 * radius_;
        case TargetKind::DiffusedIsing: return 2.0 * std::sqrt(static_cast<double>(dim_));
        case TargetKind::Discrete: {
            double best = 0.0;
            for (Eigen::Index a = 0; a < points_.rows(); ++a)
                for (Eigen::Index b = a + 1; b < points_.rows(); ++b)
                    best = std::max(best, (points_.row(a) - points_.row(b)).norm());
            return best;
        }
    }
    return 0.0;
}

double Target::radius() const {
    require(kind_ == TargetKind::Hypersphere, Errc::invalid_argument, "radius: not a hypersphere");
    return radius_;
}

const Eigen::MatrixXd& Target::coupling() const {
    require(kind_ == TargetKind::DiffusedIsing, Errc::invalid_argument, "coupling: not diffused Ising");
    return coupling_;
}

double Target::ising_temperature() const {
    require(kind_ == TargetKind::DiffusedIsing, Errc::invalid_argument,
            "ising_temperature: not diffused Ising");
    return ising_temperature_;
}

const RowMatrixXd& Target::atom_points() const {
    require(enumerable(), Errc::continuous_support, "hypersphere support is continuous");
    require(points_.rows() > 0, Errc::dimension_too_large,
            "atom matrix not materialized for diffused Ising with d > 16; use for_each_atom");
    return points_;
}

} // namespace difflab
