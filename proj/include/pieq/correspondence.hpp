#pragma once

#include <optional>
#include <string>
#include <vector>

namespace pieq {

/// Finite metric space given as an explicit distance table.
struct MetricGrid {
    std::vector<std::string> points;
    std::vector<std::vector<double>> dist;

    /// Checks symmetry, zero diagonal, nonnegativity and the triangle
    /// inequality within 1e-9. Throws std::invalid_argument on violation.
    void validate() const;

    /// Sorted list of distinct positive pairwise distances.
    std::vector<double> distinct_distances() const;
};

/// Set-valued map on a finite domain. Values are sorted index lists into
/// the codomain. The domain may carry a metric (for semicontinuity tests)
/// and/or a sigma partition (for measurability and selections).
class Correspondence {
public:
    Correspondence(std::vector<std::string> domain, std::vector<std::string> codomain,
                   std::vector<std::vector<int>> values,
                   std::optional<MetricGrid> metric = std::nullopt,
                   std::optional<std::vector<std::vector<int>>> cells = std::nullopt);

    int domain_size() const { return static_cast<int>(domain_.size()); }
    int codomain_size() const { return static_cast<int>(codomain_.size()); }
    const std::vector<std::string>& domain() const { return domain_; }
    const std::vector<std::string>& codomain() const { return codomain_; }
    const std::vector<int>& value(int x) const { return values_.at(static_cast<std::size_t>(x)); }
    const std::vector<std::vector<int>>& values() const { return values_; }
    bool has_metric() const { return metric_.has_value(); }
    const MetricGrid& metric() const;
    bool has_cells() const { return cells_.has_value(); }
    const std::vector<std::vector<int>>& cells() const;

    bool all_values_nonempty() const;

    /// {x : F(x) subset of A}. A is a set of codomain indices.
    std::vector<int> upper_inverse(const std::vector<int>& A) const;
    /// {x : F(x) meets A}.
    std::vector<int> lower_inverse(const std::vector<int>& A) const;

    /// True iff F is constant on every sigma cell, i.e. every fiber
    /// F^{-1}(y) is a union of cells.
    bool is_measurable() const;

    /// Containment form of upper/lower semicontinuity at scale delta:
    /// usc: F(x') subset of F(x) for all pairs with dist(x,x') < delta;
    /// lsc: F(x) subset of F(x').
    bool usc_modulus(double delta) const;
    bool lsc_modulus(double delta) const;
    /// Largest delta in the distinct-distance list passing usc_modulus
    /// (0 when none passes).
    double max_usc_modulus() const;

    /// Patch of two correspondences: this off A, `inner` on A.
    /// Requires inner(x) subset of this(x) for all x in A.
    Correspondence glue(const Correspondence& inner, const std::vector<int>& A) const;

    Correspondence intersect(const Correspondence& other) const;
    /// Identity on finite codomains; kept for interface parity.
    Correspondence close_values() const { return *this; }
    /// Per point: codomain elements whose embedding lies in the convex
    /// hull of the embedded value set. `embedding` maps codomain index
    /// to a coordinate vector.
    Correspondence hull_values(const std::vector<std::vector<double>>& embedding) const;

private:
    std::vector<std::string> domain_;
    std::vector<std::string> codomain_;
    std::vector<std::vector<int>> values_;
    std::optional<MetricGrid> metric_;
    std::optional<std::vector<std::vector<int>>> cells_;
};

bool subset_of(const std::vector<int>& a, const std::vector<int>& b);
std::vector<int> set_intersection(const std::vector<int>& a, const std::vector<int>& b);
std::vector<int> set_complement(int universe_size, const std::vector<int>& a);

}  // namespace pieq
