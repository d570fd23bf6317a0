#include "plates/vtk.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace plates {

void write_vtk(const std::string& path, const SimplicialComplex3& k, const Eigen::MatrixX3d& values,
               const std::string& title)
{
    if (values.rows() != k.num_vertices())
        throw std::invalid_argument("one value per vertex is required");
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write " + path);
    std::string t = title.substr(0, 255);
    for (char& c : t)
        if (c == '\n')
            c = ' ';
    os << "# vtk DataFile Version 3.0\n" << t << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    char buf[160];
    os << "POINTS " << k.num_vertices() << " double\n";
    for (const Vec3& x : k.vertices()) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", x[0], x[1], x[2]);
        os << buf;
    }
    os << "CELLS " << k.num_tets() << " " << 5 * k.num_tets() << "\n";
    for (int c = 0; c < k.num_tets(); ++c) {
        auto v = k.tet(c);
        // VTK wants positive orientation
        if (k.tet_sign(c) < 0)
            std::swap(v[0], v[1]);
        os << "4 " << v[0] << " " << v[1] << " " << v[2] << " " << v[3] << "\n";
    }
    os << "CELL_TYPES " << k.num_tets() << "\n";
    for (int c = 0; c < k.num_tets(); ++c)
        os << "10\n";
    os << "POINT_DATA " << k.num_vertices() << "\nSCALARS magnitude double 1\nLOOKUP_TABLE default\n";
    for (int p = 0; p < k.num_vertices(); ++p) {
        std::snprintf(buf, sizeof buf, "%.17g\n", values.row(p).norm());
        os << buf;
    }
    os << "VECTORS wave double\n";
    for (int p = 0; p < k.num_vertices(); ++p) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", values(p, 0), values(p, 1), values(p, 2));
        os << buf;
    }
}

}  // namespace plates
