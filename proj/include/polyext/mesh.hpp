#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace polyext {

// Ordered nodes t_0 = 0 < t_1 < ... < t_N = L.
struct Partition1D {
    std::vector<double> nodes;
    std::vector<double> lengths;

    std::size_t cells() const { return lengths.size(); }
    double length() const { return nodes.back(); }

    // Index of the cell containing t (right-closed at the last cell).
    std::size_t locate(double t) const;
};

Partition1D uniform_partition(double L, std::size_t N);

// Nodes y_m = Y (m/M)^gamma, gamma >= 1; gamma = 1 is uniform.
Partition1D graded_partition(double Y, std::size_t M, double gamma);

// Tensor grid on [0,1] x [0,Y]; flat cell ids are y-major:
// id = i_x * (y cells) + j_y.
struct CylinderMesh {
    Partition1D x;
    Partition1D y;

    std::size_t cell_count() const { return x.cells() * y.cells(); }
    std::size_t flat_cell(std::size_t i, std::size_t j) const {
        return i * y.cells() + j;
    }
    std::pair<std::size_t, std::size_t> cell_index(std::size_t id) const {
        return {id / y.cells(), id % y.cells()};
    }
};

} // namespace polyext
