#include "pieq/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace pieq {

namespace {

void check_probability_vector(const std::vector<double>& mass, double tol) {
    double total = 0.0;
    for (double m : mass) {
        if (m < -tol) throw std::invalid_argument("negative mass entry");
        total += m;
    }
    if (std::abs(total - 1.0) > tol) throw std::invalid_argument("masses do not sum to one");
}

}  // namespace

Distribution::Distribution(std::vector<std::string> support, std::vector<double> mass)
    : support_(std::move(support)), mass_(std::move(mass)) {
    if (support_.size() != mass_.size())
        throw std::invalid_argument("support/mass length mismatch");
    check_probability_vector(mass_, kWeightTol);
}

Distribution Distribution::point(std::vector<std::string> support, int index) {
    std::vector<double> mass(support.size(), 0.0);
    mass.at(static_cast<std::size_t>(index)) = 1.0;
    return Distribution(std::move(support), std::move(mass));
}

int Distribution::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < support_.size(); ++i)
        if (support_[i] == name) return static_cast<int>(i);
    return -1;
}

double tv_distance(const Distribution& p, const Distribution& q) {
    if (p.support() != q.support())
        throw std::invalid_argument("tv_distance: mismatched supports");
    double acc = 0.0;
    for (int i = 0; i < p.size(); ++i) acc += std::abs(p.mass(i) - q.mass(i));
    return 0.5 * acc;
}

FiniteProbSpace::FiniteProbSpace(std::vector<std::string> atoms, std::vector<double> weights,
                                 std::vector<std::vector<int>> cells)
    : atoms_(std::move(atoms)), weights_(std::move(weights)), cells_(std::move(cells)) {
    if (atoms_.empty()) throw std::invalid_argument("empty atom list");
    if (atoms_.size() != weights_.size())
        throw std::invalid_argument("atom/weight length mismatch");
    std::unordered_set<std::string> seen;
    for (const auto& a : atoms_)
        if (!seen.insert(a).second) throw std::invalid_argument("duplicate atom id: " + a);
    check_probability_vector(weights_, kWeightTol);

    if (cells_.empty()) {
        cells_.resize(atoms_.size());
        for (std::size_t i = 0; i < atoms_.size(); ++i) cells_[i] = {static_cast<int>(i)};
    }
    cell_of_.assign(atoms_.size(), -1);
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        for (int atom : cells_[c]) {
            if (atom < 0 || atom >= size()) throw std::invalid_argument("cell atom out of range");
            if (cell_of_[static_cast<std::size_t>(atom)] != -1)
                throw std::invalid_argument("atom in more than one cell");
            cell_of_[static_cast<std::size_t>(atom)] = static_cast<int>(c);
        }
    }
    for (int c : cell_of_)
        if (c == -1) throw std::invalid_argument("atom not covered by the sigma partition");
}

double FiniteProbSpace::cell_weight(int cell) const {
    double w = 0.0;
    for (int atom : cells_.at(static_cast<std::size_t>(cell)))
        w += weights_[static_cast<std::size_t>(atom)];
    return w;
}

double FiniteProbSpace::max_atom_weight() const {
    return *std::max_element(weights_.begin(), weights_.end());
}

FiniteProbSpace FiniteProbSpace::refine(int k) const {
    if (k < 1) throw std::invalid_argument("refine: k must be positive");
    if (k == 1) return *this;
    std::vector<std::string> atoms;
    std::vector<double> weights;
    atoms.reserve(atoms_.size() * static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        for (int j = 0; j < k; ++j) {
            atoms.push_back(atoms_[i] + "#" + std::to_string(j));
            weights.push_back(weights_[i] / k);
        }
    }
    std::vector<std::vector<int>> cells(cells_.size());
    for (std::size_t c = 0; c < cells_.size(); ++c)
        for (int atom : cells_[c])
            for (int j = 0; j < k; ++j) cells[c].push_back(atom * k + j);
    return FiniteProbSpace(std::move(atoms), std::move(weights), std::move(cells));
}

Distribution pushforward(const FiniteProbSpace& space, std::span<const int> choice,
                         std::vector<std::string> support) {
    if (static_cast<int>(choice.size()) != space.size())
        throw std::invalid_argument("pushforward: map not total on atoms");
    std::vector<double> mass(support.size(), 0.0);
    for (int i = 0; i < space.size(); ++i) {
        int y = choice[static_cast<std::size_t>(i)];
        if (y < 0 || y >= static_cast<int>(support.size()))
            throw std::invalid_argument("pushforward: action index out of range");
        mass[static_cast<std::size_t>(y)] += space.weight(i);
    }
    return Distribution(std::move(support), std::move(mass));
}

ProductSpace::ProductSpace(std::vector<std::vector<std::string>> factor_atoms,
                           std::vector<double> joint_weights)
    : factors_(std::move(factor_atoms)), weights_(std::move(joint_weights)) {
    if (factors_.empty()) throw std::invalid_argument("product space needs factors");
    std::int64_t total = 1;
    for (const auto& f : factors_) {
        if (f.empty()) throw std::invalid_argument("empty factor atom set");
        total *= static_cast<std::int64_t>(f.size());
    }
    if (total != static_cast<std::int64_t>(weights_.size()))
        throw std::invalid_argument("joint weight table does not cover the full product");
    check_probability_vector(weights_, kWeightTol);
    strides_.assign(factors_.size(), 1);
    for (int i = static_cast<int>(factors_.size()) - 2; i >= 0; --i)
        strides_[static_cast<std::size_t>(i)] =
            strides_[static_cast<std::size_t>(i) + 1] *
            static_cast<std::int64_t>(factors_[static_cast<std::size_t>(i) + 1].size());
}

int ProductSpace::project(std::int64_t joint_atom, int factor) const {
    if (factor < 0 || factor >= num_factors())
        throw std::out_of_range("projection index out of range");
    if (joint_atom < 0 || joint_atom >= size())
        throw std::out_of_range("joint atom out of range");
    auto f = static_cast<std::size_t>(factor);
    return static_cast<int>((joint_atom / strides_[f]) %
                            static_cast<std::int64_t>(factors_[f].size()));
}

std::vector<int> ProductSpace::unrank(std::int64_t joint_atom) const {
    std::vector<int> out(static_cast<std::size_t>(num_factors()));
    for (int i = 0; i < num_factors(); ++i) out[static_cast<std::size_t>(i)] = project(joint_atom, i);
    return out;
}

std::int64_t ProductSpace::rank(std::span<const int> components) const {
    if (static_cast<int>(components.size()) != num_factors())
        throw std::invalid_argument("rank: component count mismatch");
    std::int64_t r = 0;
    for (int i = 0; i < num_factors(); ++i) {
        int c = components[static_cast<std::size_t>(i)];
        if (c < 0 || c >= static_cast<int>(factors_[static_cast<std::size_t>(i)].size()))
            throw std::out_of_range("rank: component out of range");
        r += strides_[static_cast<std::size_t>(i)] * c;
    }
    return r;
}

Distribution ProductSpace::marginal(int factor) const {
    if (factor < 0 || factor >= num_factors())
        throw std::out_of_range("marginal index out of range");
    std::vector<double> mass(factors_[static_cast<std::size_t>(factor)].size(), 0.0);
    for (std::int64_t w = 0; w < size(); ++w)
        mass[static_cast<std::size_t>(project(w, factor))] += weights_[static_cast<std::size_t>(w)];
    return Distribution(factors_[static_cast<std::size_t>(factor)], std::move(mass));
}

bool ProductSpace::is_mutually_independent(const std::vector<std::vector<int>>& grouping,
                                           double tol, double* deviation) const {
    std::vector<int> owner(static_cast<std::size_t>(num_factors()), -1);
    for (std::size_t g = 0; g < grouping.size(); ++g) {
        for (int f : grouping[g]) {
            if (f < 0 || f >= num_factors()) throw std::invalid_argument("grouping index out of range");
            if (owner[static_cast<std::size_t>(f)] != -1)
                throw std::invalid_argument("grouping is not a partition (overlap)");
            owner[static_cast<std::size_t>(f)] = static_cast<int>(g);
        }
    }
    for (int o : owner)
        if (o == -1) throw std::invalid_argument("grouping is not a partition (missing factor)");

    // Group marginal masses, keyed by the rank restricted to the group.
    std::vector<std::vector<double>> group_mass(grouping.size());
    std::vector<std::vector<std::int64_t>> group_stride(grouping.size());
    for (std::size_t g = 0; g < grouping.size(); ++g) {
        std::int64_t sz = 1;
        group_stride[g].assign(grouping[g].size(), 1);
        for (int i = static_cast<int>(grouping[g].size()) - 1; i >= 0; --i) {
            group_stride[g][static_cast<std::size_t>(i)] = sz;
            sz *= static_cast<std::int64_t>(
                factors_[static_cast<std::size_t>(grouping[g][static_cast<std::size_t>(i)])].size());
        }
        group_mass[g].assign(static_cast<std::size_t>(sz), 0.0);
    }
    auto group_rank = [&](std::int64_t w, std::size_t g) {
        std::int64_t r = 0;
        for (std::size_t i = 0; i < grouping[g].size(); ++i)
            r += group_stride[g][i] * project(w, grouping[g][i]);
        return r;
    };
    for (std::int64_t w = 0; w < size(); ++w)
        for (std::size_t g = 0; g < grouping.size(); ++g)
            group_mass[g][static_cast<std::size_t>(group_rank(w, g))] +=
                weights_[static_cast<std::size_t>(w)];

    // Deviation is the largest single-atom gap between the joint and the
    // product of group marginals (sup norm).
    double dev = 0.0;
    for (std::int64_t w = 0; w < size(); ++w) {
        double prod = 1.0;
        for (std::size_t g = 0; g < grouping.size(); ++g)
            prod *= group_mass[g][static_cast<std::size_t>(group_rank(w, g))];
        dev = std::max(dev, std::abs(weights_[static_cast<std::size_t>(w)] - prod));
    }
    if (deviation != nullptr) *deviation = dev;
    return dev <= tol;
}

ProductSpace marginalize(const ProductSpace& p, const std::vector<int>& keep) {
    if (keep.empty()) throw std::invalid_argument("marginalize: empty factor list");
    std::vector<std::vector<std::string>> factors;
    factors.reserve(keep.size());
    std::int64_t total = 1;
    for (int f : keep) {
        factors.push_back(p.factor(f));
        total *= static_cast<std::int64_t>(p.factor(f).size());
    }
    std::vector<double> weights(static_cast<std::size_t>(total), 0.0);
    std::vector<std::int64_t> strides(keep.size(), 1);
    for (int i = static_cast<int>(keep.size()) - 2; i >= 0; --i)
        strides[static_cast<std::size_t>(i)] =
            strides[static_cast<std::size_t>(i) + 1] *
            static_cast<std::int64_t>(p.factor(keep[static_cast<std::size_t>(i) + 1]).size());
    for (std::int64_t w = 0; w < p.size(); ++w) {
        std::int64_t r = 0;
        for (std::size_t i = 0; i < keep.size(); ++i) r += strides[i] * p.project(w, keep[i]);
        weights[static_cast<std::size_t>(r)] += p.weight(w);
    }
    return ProductSpace(std::move(factors), std::move(weights));
}

}  // namespace pieq
