#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace fracmono {

/// Row-major table of state vectors sampled on a uniform time grid.
/// Row k holds the state at t_k = k * dt.
class NodalSeries {
public:
    NodalSeries() = default;
    NodalSeries(std::size_t n_nodes, std::size_t n_dof, double fill = 0.0)
        : n_nodes_(n_nodes), n_dof_(n_dof), data_(n_nodes * n_dof, fill) {}

    [[nodiscard]] std::size_t n_nodes() const noexcept { return n_nodes_; }
    [[nodiscard]] std::size_t n_dof() const noexcept { return n_dof_; }
    [[nodiscard]] bool empty() const noexcept { return n_nodes_ == 0; }

    [[nodiscard]] std::span<double> row(std::size_t k) {
        assert(k < n_nodes_);
        return {data_.data() + k * n_dof_, n_dof_};
    }
    [[nodiscard]] std::span<const double> row(std::size_t k) const {
        assert(k < n_nodes_);
        return {data_.data() + k * n_dof_, n_dof_};
    }

    double& operator()(std::size_t k, std::size_t i) { return data_[k * n_dof_ + i]; }
    double operator()(std::size_t k, std::size_t i) const { return data_[k * n_dof_ + i]; }

    [[nodiscard]] std::span<double> flat() noexcept { return data_; }
    [[nodiscard]] std::span<const double> flat() const noexcept { return data_; }

    void push_back(std::span<const double> state) {
        if (n_nodes_ == 0 && data_.empty()) n_dof_ = state.size();
        assert(state.size() == n_dof_);
        data_.insert(data_.end(), state.begin(), state.end());
        ++n_nodes_;
    }

    friend bool operator==(const NodalSeries&, const NodalSeries&) = default;

private:
    std::size_t n_nodes_ = 0;
    std::size_t n_dof_ = 0;
    std::vector<double> data_;
};

} // namespace fracmono
