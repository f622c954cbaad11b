#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pieq {

// Tolerance for "weights sum to one" style validity checks.
inline constexpr double kWeightTol = 1e-9;
// Tolerance for distribution deduplication and mass accounting.
inline constexpr double kMassTol = 1e-12;

/// Probability vector over a finite ordered action set.
class Distribution {
public:
    Distribution(std::vector<std::string> support, std::vector<double> mass);

    static Distribution point(std::vector<std::string> support, int index);

    const std::vector<std::string>& support() const { return support_; }
    const std::vector<double>& mass() const { return mass_; }
    double mass(int i) const { return mass_.at(static_cast<std::size_t>(i)); }
    int size() const { return static_cast<int>(support_.size()); }

    /// Index of a support element by name, -1 if absent.
    int index_of(std::string_view name) const;

private:
    std::vector<std::string> support_;
    std::vector<double> mass_;
};

/// Total-variation distance (1/2) * sum |p - q|. Requires identical supports.
double tv_distance(const Distribution& p, const Distribution& q);

/// Finite probability space: atoms with weights and a sigma partition.
/// The partition defaults to the finest one (every atom its own cell).
class FiniteProbSpace {
public:
    FiniteProbSpace(std::vector<std::string> atoms, std::vector<double> weights,
                    std::vector<std::vector<int>> cells = {});

    int size() const { return static_cast<int>(atoms_.size()); }
    const std::vector<std::string>& atoms() const { return atoms_; }
    const std::vector<double>& weights() const { return weights_; }
    double weight(int i) const { return weights_.at(static_cast<std::size_t>(i)); }
    const std::vector<std::vector<int>>& cells() const { return cells_; }
    int num_cells() const { return static_cast<int>(cells_.size()); }
    int cell_of(int atom) const { return cell_of_.at(static_cast<std::size_t>(atom)); }
    double cell_weight(int cell) const;

    /// Largest atom weight; the "atomicity level" reported by audits.
    double max_atom_weight() const;

    /// Split every atom into k equal-weight sub-atoms; cells are inherited.
    FiniteProbSpace refine(int k) const;

private:
    std::vector<std::string> atoms_;
    std::vector<double> weights_;
    std::vector<std::vector<int>> cells_;
    std::vector<int> cell_of_;
};

/// Pushforward of the space measure under an atom -> action map.
Distribution pushforward(const FiniteProbSpace& space, std::span<const int> choice,
                         std::vector<std::string> support);

/// Joint measure over the Cartesian product of factor atom sets.
/// Joint atoms are ranked row-major (last factor fastest); zero-weight
/// atoms are kept so the index space is stable.
class ProductSpace {
public:
    ProductSpace(std::vector<std::vector<std::string>> factor_atoms,
                 std::vector<double> joint_weights);

    int num_factors() const { return static_cast<int>(factors_.size()); }
    const std::vector<std::string>& factor(int i) const {
        return factors_.at(static_cast<std::size_t>(i));
    }
    std::int64_t size() const { return static_cast<std::int64_t>(weights_.size()); }
    double weight(std::int64_t joint_atom) const {
        return weights_.at(static_cast<std::size_t>(joint_atom));
    }
    const std::vector<double>& weights() const { return weights_; }

    /// Coordinate projection: the factor-i component of a joint atom.
    int project(std::int64_t joint_atom, int factor) const;

    std::vector<int> unrank(std::int64_t joint_atom) const;
    std::int64_t rank(std::span<const int> components) const;

    Distribution marginal(int factor) const;

    /// Tests whether the joint equals the product of its group marginals
    /// within tol in the per-atom sup norm. `grouping` must partition the factor
    /// indices. Reports the actual deviation through `deviation` when given.
    bool is_mutually_independent(const std::vector<std::vector<int>>& grouping, double tol,
                                 double* deviation = nullptr) const;

private:
    std::vector<std::vector<std::string>> factors_;
    std::vector<double> weights_;
    std::vector<std::int64_t> strides_;
};

/// Marginal joint measure over a subset of factors (in the given order).
ProductSpace marginalize(const ProductSpace& p, const std::vector<int>& keep);

}  // namespace pieq
