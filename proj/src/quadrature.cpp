#include "apk/quadrature.hpp"

namespace apk {

std::vector<Point> midpoint_nodes(std::size_t dim, double R, std::size_t per_axis) {
    if (dim == 0 || dim > kMaxDim) throw Error(ErrorCode::InvalidArgument, "unsupported dimension");
    if (!(R > 0.0) || per_axis == 0) throw Error(ErrorCode::InvalidArgument, "quadrature needs R > 0 and nodes");
    const double h = midpoint_pitch(R, per_axis);
    std::vector<Point> out;
    std::array<std::size_t, kMaxDim> k{};
    const double r2 = R * R;
    while (true) {
        Point u(dim);
        for (std::size_t a = 0; a < dim; ++a) u[a] = -R + (static_cast<double>(k[a]) + 0.5) * h;
        if (u.norm2() <= r2) out.push_back(u);
        std::size_t a = 0;
        while (a < dim) {
            if (++k[a] < per_axis) break;
            k[a] = 0;
            ++a;
        }
        if (a == dim) break;
    }
    return out;
}

} // namespace apk
