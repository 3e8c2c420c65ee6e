#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "difflab/errors.hpp"
#include "difflab/rng.hpp"

namespace difflab {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class TargetKind { TwoDeltas, Discrete, Hypersphere, DiffusedIsing };

std::string to_string(TargetKind kind);

struct SupportAtom {
    Eigen::VectorXd point;
    double log_weight; // normalized: logsumexp over the support is 0
};

// A target distribution phi(y). Immutable after construction and safe to
// share across threads; sampling takes an explicit per-call RNG stream.
class Target {
public:
    // y = -1 or +1 with probability 1/2 (1-D)
    static Target two_deltas();

    // weighted mixture of deltas at the given points (rows); empty weights
    // means uniform. Weights must be positive and sum to 1 within 1e-9
    // (renormalized exactly if they do).
    static Target discrete(RowMatrixXd points, Eigen::VectorXd weights = {});

    // uniform on the sphere of the given radius in `dim` ambient dimensions
    static Target hypersphere(int dim, double radius);

    // y in {-1,+1}^d with log phi(y) = -(1/2T) sum_{j!=k} y_j y_k W_jk + const;
    // W symmetric with zero diagonal, d <= 24 (exhaustive enumeration bound)
    static Target diffused_ising(Eigen::MatrixXd coupling, double temperature);

    TargetKind kind() const noexcept { return kind_; }
    int dim() const noexcept { return dim_; }

    // exact-thermodynamics capability flags
    bool enumerable() const noexcept { return kind_ != TargetKind::Hypersphere; }
    bool constant_norm() const noexcept { return constant_norm_; }
    double support_norm() const; // common atom norm (constant-norm targets)

    std::size_t atom_count() const;
    std::vector<SupportAtom> enumerate_support() const; // ContinuousSupport for the sphere

    // Inline iteration over the support without materializing it; f receives
    // (const double* y, double log_weight) with dim() entries. Enumerable only.
    template <typename F>
    void for_each_atom(F&& f) const {
        require(enumerable(), Errc::continuous_support,
                "for_each_atom: hypersphere support is continuous");
        if (kind_ != TargetKind::DiffusedIsing) {
            for (Eigen::Index j = 0; j < points_.rows(); ++j)
                f(points_.row(j).data(), log_weights_[j]);
            return;
        }
        std::vector<double> y(static_cast<std::size_t>(dim_));
        const std::uint64_t n = std::uint64_t{1} << dim_;
        for (std::uint64_t idx = 0; idx < n; ++idx) {
            for (int k = 0; k < dim_; ++k)
                y[static_cast<std::size_t>(k)] = (idx >> k) & 1u ? 1.0 : -1.0;
            f(y.data(), log_weights_[static_cast<Eigen::Index>(idx)]);
        }
    }

    // log phi at a support atom; OffSupport if y is not an atom (tol 1e-9)
    double atom_log_weight(const Eigen::VectorXd& y) const;

    Eigen::VectorXd sample(RngStream& rng) const;
    RowMatrixXd sample_many(int n, RngStream& rng) const;

    // exact first and second moments of phi
    const Eigen::VectorXd& mean() const noexcept { return mean_; }
    const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }

    // largest distance between support atoms (2r for the sphere)
    double support_diameter() const;

    double radius() const; // hypersphere only
    const Eigen::MatrixXd& coupling() const; // diffused Ising only
    double ising_temperature() const; // diffused Ising only

    // materialized atoms for small enumerable targets (not built for
    // diffused Ising with d > 16; use for_each_atom there)
    const RowMatrixXd& atom_points() const;
    const Eigen::VectorXd& atom_log_weights() const noexcept { return log_weights_; }

private:
    Target() = default;
    void finalize_enumerable();

    TargetKind kind_ = TargetKind::TwoDeltas;
    int dim_ = 1;
    bool constant_norm_ = false;

    RowMatrixXd points_;          // atoms (rows); empty for sphere and large Ising
    Eigen::VectorXd log_weights_; // normalized atom log-weights
    Eigen::VectorXd cumulative_;  // inclusive CDF for exact sampling

    double radius_ = 0.0;
    Eigen::MatrixXd coupling_;
    double ising_temperature_ = 1.0;

    Eigen::VectorXd mean_;
    Eigen::MatrixXd covariance_;
};

} // namespace difflab
