#pragma once

#include <vector>

namespace mdiqkd {

enum class Basis { Z, X };
enum class Role { correct, error };

inline constexpr Basis kBases[] = {Basis::Z, Basis::X};

/// Per-(i, j) photon-number yields for the correct and erroneous input
/// pairings of each basis: Z uses (H, V) / (H, H), X uses (+, +) / (+, -).
/// Entries already carry the symmetry factors, so a basis gain is the plain
/// double sum sum_ij P(i) P(j) Y_ij.
class YieldTable {
public:
    YieldTable() = default;
    explicit YieldTable(int cutoff);

    int cutoff() const { return cutoff_; }

    double at(Basis basis, Role role, int i, int j) const { return data_[index(basis, role, i, j)]; }
    void set(Basis basis, Role role, int i, int j, double value) { data_[index(basis, role, i, j)] = value; }

    // Row i of the (basis, role) block: Y(i, 0..cutoff).
    const double* row(Basis basis, Role role, int i) const { return data_.data() + index(basis, role, i, 0); }

private:
    std::size_t index(Basis basis, Role role, int i, int j) const {
        const std::size_t side = static_cast<std::size_t>(cutoff_) + 1;
        const std::size_t block = static_cast<std::size_t>(basis == Basis::X) * 2 + (role == Role::error);
        return (block * side + static_cast<std::size_t>(i)) * side + static_cast<std::size_t>(j);
    }

    int cutoff_ = 0;
    std::vector<double> data_ = std::vector<double>(4, 0.0);
};

} // namespace mdiqkd
