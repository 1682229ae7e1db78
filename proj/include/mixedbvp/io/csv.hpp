#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "mixedbvp/core/grid.hpp"

namespace mixedbvp {

inline std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// x, y[, z], u, node_class for every non-exterior node in storage order.
inline void write_field_csv(std::ostream& out, const GridField& u) {
    const int dim = u.grid.dim;
    out << (dim == 3 ? "x,y,z,u,node_class\n" : "x,y,u,node_class\n");
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u.node_class[i] == NodeClass::Exterior) continue;
        const Vec x = u.coord(i);
        for (int k = 0; k < dim; ++k) out << csv_double(x[k]) << ',';
        out << csv_double(u[i]) << ',' << to_string(u.node_class[i]) << '\n';
    }
}

inline void write_history_csv(std::ostream& out, const std::vector<double>& history) {
    out << "iteration,residual\n";
    for (std::size_t k = 0; k < history.size(); ++k) out << k + 1 << ',' << csv_double(history[k]) << '\n';
}

} // namespace mixedbvp
