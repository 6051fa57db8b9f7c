#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace spump {

/// Internal levels of one qubit ion. Index order is fixed: the qubit pair
/// first, then the auxiliary level, then the aggregate leak level.
enum class Level : int { down = 0, up = 1, aux = 2, leak = 3 };

const char* level_name(Level l);

/// Tensor factorization ion1 (x) ion2 (x) mode3 [(x) mode4], row-major so the
/// last factor varies fastest. Immutable after construction.
class HilbertLayout {
public:
    /// Throws std::invalid_argument for unsupported level counts or modes.
    HilbertLayout(int ion_levels, std::vector<int> mode_dims);

    int ion_levels() const { return ion_levels_; }
    const std::vector<int>& mode_dims() const { return mode_dims_; }
    std::size_t mode_count() const { return mode_dims_.size(); }
    std::size_t mode_block() const { return mode_block_; }
    std::size_t total_dim() const { return total_dim_; }
    bool has_mode4() const { return mode_dims_.size() > 1; }
    bool has_level(Level l) const { return static_cast<int>(l) < ion_levels_; }

    /// Flat index of |l1, l2; n3 [, n4]>.
    std::size_t index(int l1, int l2, int n3, int n4 = 0) const;
    std::size_t index(Level l1, Level l2, int n3, int n4 = 0) const {
        return index(static_cast<int>(l1), static_cast<int>(l2), n3, n4);
    }

    struct Coordinates {
        int l1, l2, n3, n4;
    };
    Coordinates coordinates(std::size_t flat) const;

    std::string describe() const;

    bool operator==(const HilbertLayout& o) const {
        return ion_levels_ == o.ion_levels_ && mode_dims_ == o.mode_dims_;
    }
    bool operator!=(const HilbertLayout& o) const { return !(*this == o); }

private:
    int ion_levels_;
    std::vector<int> mode_dims_;
    std::size_t mode_block_;
    std::size_t total_dim_;
};

inline HilbertLayout build_layout(int ion_levels, std::vector<int> mode_dims) {
    return HilbertLayout(ion_levels, std::move(mode_dims));
}

}  // namespace spump
