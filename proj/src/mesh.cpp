#include "polyext/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polyext {

std::size_t Partition1D::locate(double t) const
{
    if (t < nodes.front() || t > nodes.back())
        throw std::domain_error("Partition1D: point outside domain");
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
    std::size_t cell = static_cast<std::size_t>(it - nodes.begin());
    cell = cell == 0 ? 0 : cell - 1;
    return std::min(cell, cells() - 1);
}

namespace {

Partition1D from_nodes(std::vector<double> nodes)
{
    Partition1D p;
    p.nodes = std::move(nodes);
    p.lengths.resize(p.nodes.size() - 1);
    for (std::size_t m = 0; m + 1 < p.nodes.size(); ++m) {
        p.lengths[m] = p.nodes[m + 1] - p.nodes[m];
        if (!(p.lengths[m] > 0.0))
            throw std::domain_error("Partition1D: nodes must be strictly increasing");
    }
    return p;
}

} // namespace

Partition1D uniform_partition(double L, std::size_t N)
{
    if (N == 0) throw std::domain_error("uniform_partition: N must be >= 1");
    if (!(L > 0.0)) throw std::domain_error("uniform_partition: L must be positive");
    std::vector<double> nodes(N + 1);
    for (std::size_t j = 0; j <= N; ++j) nodes[j] = L * static_cast<double>(j) / N;
    return from_nodes(std::move(nodes));
}

Partition1D graded_partition(double Y, std::size_t M, double gamma)
{
    if (M == 0) throw std::domain_error("graded_partition: M must be >= 1");
    if (!(Y > 0.0)) throw std::domain_error("graded_partition: Y must be positive");
    if (!(gamma >= 1.0)) throw std::domain_error("graded_partition: gamma must be >= 1");
    std::vector<double> nodes(M + 1);
    for (std::size_t m = 0; m <= M; ++m)
        nodes[m] = Y * std::pow(static_cast<double>(m) / M, gamma);
    nodes[M] = Y; // pin the endpoint against pow roundoff
    return from_nodes(std::move(nodes));
}

} // namespace polyext
