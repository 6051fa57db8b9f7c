#include "spump/layout.hpp"

#include <sstream>
#include <stdexcept>

namespace spump {

const char* level_name(Level l) {
    switch (l) {
        case Level::down: return "down";
        case Level::up: return "up";
        case Level::aux: return "a";
        case Level::leak: return "x";
    }
    return "?";
}

HilbertLayout::HilbertLayout(int ion_levels, std::vector<int> mode_dims)
    : ion_levels_(ion_levels), mode_dims_(std::move(mode_dims)) {
    if (ion_levels_ != 3 && ion_levels_ != 4)
        throw std::invalid_argument("ion_levels must be 3 or 4, got " + std::to_string(ion_levels_));
    if (mode_dims_.empty() || mode_dims_.size() > 2)
        throw std::invalid_argument("mode_dims must list mode 3 and optionally mode 4");
    mode_block_ = 1;
    for (int d : mode_dims_) {
        if (d < 2) throw std::invalid_argument("every mode truncation must be >= 2");
        mode_block_ *= static_cast<std::size_t>(d);
    }
    total_dim_ = static_cast<std::size_t>(ion_levels_ * ion_levels_) * mode_block_;
}

std::size_t HilbertLayout::index(int l1, int l2, int n3, int n4) const {
    const std::size_t m4 = has_mode4() ? static_cast<std::size_t>(mode_dims_[1]) : 1;
    return ((static_cast<std::size_t>(l1) * ion_levels_ + l2) * mode_dims_[0] + n3) * m4 + n4;
}

HilbertLayout::Coordinates HilbertLayout::coordinates(std::size_t flat) const {
    const std::size_t m4 = has_mode4() ? static_cast<std::size_t>(mode_dims_[1]) : 1;
    Coordinates c{};
    c.n4 = static_cast<int>(flat % m4);
    flat /= m4;
    c.n3 = static_cast<int>(flat % mode_dims_[0]);
    flat /= mode_dims_[0];
    c.l2 = static_cast<int>(flat % ion_levels_);
    c.l1 = static_cast<int>(flat / ion_levels_);
    return c;
}

std::string HilbertLayout::describe() const {
    std::ostringstream os;
    os << "ions " << ion_levels_ << "x" << ion_levels_ << ", modes [";
    for (std::size_t i = 0; i < mode_dims_.size(); ++i) os << (i ? "," : "") << mode_dims_[i];
    os << "], dim " << total_dim_;
    return os.str();
}

}  // namespace spump
