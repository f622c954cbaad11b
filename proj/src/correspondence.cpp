#include "pieq/correspondence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pieq/hull.hpp"

namespace pieq {

void MetricGrid::validate() const {
    const auto n = points.size();
    if (dist.size() != n) throw std::invalid_argument("metric: table size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (dist[i].size() != n) throw std::invalid_argument("metric: table row size mismatch");
        if (std::abs(dist[i][i]) > 1e-12) throw std::invalid_argument("metric: nonzero diagonal");
        for (std::size_t j = 0; j < n; ++j) {
            if (dist[i][j] < 0) throw std::invalid_argument("metric: negative distance");
            if (std::abs(dist[i][j] - dist[j][i]) > 1e-12)
                throw std::invalid_argument("metric: asymmetric table");
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                if (dist[i][j] > dist[i][k] + dist[k][j] + 1e-9)
                    throw std::invalid_argument("metric: triangle inequality violated");
}

std::vector<double> MetricGrid::distinct_distances() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) out.push_back(dist[i][j]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              out.end());
    return out;
}

bool subset_of(const std::vector<int>& a, const std::vector<int>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<int> set_intersection(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<int> set_complement(int universe_size, const std::vector<int>& a) {
    std::vector<int> out;
    std::size_t pos = 0;
    for (int i = 0; i < universe_size; ++i) {
        if (pos < a.size() && a[pos] == i) {
            ++pos;
        } else {
            out.push_back(i);
        }
    }
    return out;
}

Correspondence::Correspondence(std::vector<std::string> domain, std::vector<std::string> codomain,
                               std::vector<std::vector<int>> values,
                               std::optional<MetricGrid> metric,
                               std::optional<std::vector<std::vector<int>>> cells)
    : domain_(std::move(domain)),
      codomain_(std::move(codomain)),
      values_(std::move(values)),
      metric_(std::move(metric)),
      cells_(std::move(cells)) {
    if (values_.size() != domain_.size())
        throw std::invalid_argument("correspondence: values not total on domain");
    for (auto& v : values_) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        for (int y : v)
            if (y < 0 || y >= codomain_size())
                throw std::invalid_argument("correspondence: value outside codomain");
    }
    if (metric_) {
        if (metric_->points.size() != domain_.size())
            throw std::invalid_argument("correspondence: metric over wrong point set");
        metric_->validate();
    }
    if (cells_) {
        std::vector<bool> seen(domain_.size(), false);
        for (const auto& cell : *cells_) {
            for (int atom : cell) {
                if (atom < 0 || atom >= domain_size())
                    throw std::invalid_argument("correspondence: cell atom out of range");
                if (seen[static_cast<std::size_t>(atom)])
                    throw std::invalid_argument("correspondence: overlapping cells");
                seen[static_cast<std::size_t>(atom)] = true;
            }
        }
        for (bool s : seen)
            if (!s) throw std::invalid_argument("correspondence: partition does not cover domain");
    }
}

const MetricGrid& Correspondence::metric() const {
    if (!metric_) throw std::logic_error("correspondence has no metric");
    return *metric_;
}

const std::vector<std::vector<int>>& Correspondence::cells() const {
    if (!cells_) throw std::logic_error("correspondence has no sigma partition");
    return *cells_;
}

bool Correspondence::all_values_nonempty() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](const std::vector<int>& v) { return !v.empty(); });
}

std::vector<int> Correspondence::upper_inverse(const std::vector<int>& A) const {
    for (int y : A)
        if (y < 0 || y >= codomain_size())
            throw std::invalid_argument("upper_inverse: A not a subset of the codomain");
    std::vector<int> out;
    for (int x = 0; x < domain_size(); ++x)
        if (subset_of(value(x), A)) out.push_back(x);
    return out;
}

std::vector<int> Correspondence::lower_inverse(const std::vector<int>& A) const {
    for (int y : A)
        if (y < 0 || y >= codomain_size())
            throw std::invalid_argument("lower_inverse: A not a subset of the codomain");
    std::vector<int> out;
    for (int x = 0; x < domain_size(); ++x)
        if (!set_intersection(value(x), A).empty()) out.push_back(x);
    return out;
}

bool Correspondence::is_measurable() const {
    if (!has_cells()) return true;  // finest partition: every map is measurable
    const auto& cs = cells();
    for (const auto& cell : cs) {
        if (cell.empty()) continue;
        const auto& first = value(cell.front());
        for (int atom : cell)
            if (value(atom) != first) return false;
    }
    return true;
}

bool Correspondence::usc_modulus(double delta) const {
    if (delta <= 0) throw std::invalid_argument("usc_modulus: delta must be positive");
    const auto& m = metric();
    for (int x = 0; x < domain_size(); ++x)
        for (int xp = 0; xp < domain_size(); ++xp)
            if (x != xp && m.dist[static_cast<std::size_t>(x)][static_cast<std::size_t>(xp)] < delta)
                if (!subset_of(value(xp), value(x))) return false;
    return true;
}

bool Correspondence::lsc_modulus(double delta) const {
    if (delta <= 0) throw std::invalid_argument("lsc_modulus: delta must be positive");
    const auto& m = metric();
    for (int x = 0; x < domain_size(); ++x)
        for (int xp = 0; xp < domain_size(); ++xp)
            if (x != xp && m.dist[static_cast<std::size_t>(x)][static_cast<std::size_t>(xp)] < delta)
                if (!subset_of(value(x), value(xp))) return false;
    return true;
}

double Correspondence::max_usc_modulus() const {
    double best = 0.0;
    for (double d : metric().distinct_distances())
        if (usc_modulus(d)) best = d;
    return best;
}

Correspondence Correspondence::glue(const Correspondence& inner, const std::vector<int>& A) const {
    if (inner.domain_ != domain_ || inner.codomain_ != codomain_)
        throw std::invalid_argument("glue: mismatched domain or codomain");
    for (int x : A)
        if (!subset_of(inner.value(x), value(x)))
            throw std::invalid_argument("glue: F2 not contained in F1 on A");
    auto vals = values_;
    for (int x : A) vals[static_cast<std::size_t>(x)] = inner.value(x);
    return Correspondence(domain_, codomain_, std::move(vals), metric_, cells_);
}

Correspondence Correspondence::intersect(const Correspondence& other) const {
    if (other.domain_ != domain_ || other.codomain_ != codomain_)
        throw std::invalid_argument("intersect: mismatched domain or codomain");
    std::vector<std::vector<int>> vals(values_.size());
    for (int x = 0; x < domain_size(); ++x)
        vals[static_cast<std::size_t>(x)] = set_intersection(value(x), other.value(x));
    return Correspondence(domain_, codomain_, std::move(vals), metric_, cells_);
}

Correspondence Correspondence::hull_values(
    const std::vector<std::vector<double>>& embedding) const {
    if (static_cast<int>(embedding.size()) != codomain_size())
        throw std::invalid_argument("hull_values: embedding not total on the codomain");
    std::vector<std::vector<int>> vals(values_.size());
    for (int x = 0; x < domain_size(); ++x) {
        std::vector<std::vector<double>> pts;
        for (int y : value(x)) pts.push_back(embedding[static_cast<std::size_t>(y)]);
        for (int y = 0; y < codomain_size(); ++y)
            if (!pts.empty() && in_hull(pts, embedding[static_cast<std::size_t>(y)], 1e-9))
                vals[static_cast<std::size_t>(x)].push_back(y);
    }
    return Correspondence(domain_, codomain_, std::move(vals), metric_, cells_);
}

}  // namespace pieq
