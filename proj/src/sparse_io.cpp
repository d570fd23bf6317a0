#include "plates/sparse_io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace plates {

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void save_symmetric(const Eigen::SparseMatrix<double>& m, const std::string& path,
                    const std::vector<std::string>& comments)
{
    if (m.rows() != m.cols())
        throw FormatError("matrix is not square");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw FormatError("cannot write " + path);
    long nnz = 0;
    for (int j = 0; j < m.outerSize(); ++j)
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, j); it; ++it)
            if (it.row() <= it.col())
                ++nnz;
    out << "plates-sym v1\n";
    for (const auto& c : comments)
        out << "# " << c << "\n";
    out << m.rows() << ' ' << nnz << '\n';
    for (int j = 0; j < m.outerSize(); ++j)
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, j); it; ++it)
            if (it.row() <= it.col())
                out << it.row() << ' ' << it.col() << ' ' << format_double(it.value()) << '\n';
    if (!out)
        throw FormatError("failed writing " + path);
}

Eigen::SparseMatrix<double> load_symmetric(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw FormatError("cannot open " + path);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& what) {
        throw FormatError(path + ":" + std::to_string(lineno) + ": " + what);
    };
    if (!std::getline(in, line) || (++lineno, line != "plates-sym v1"))
        fail("expected header 'plates-sym v1'");
    long n = -1, nnz = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream ss(line);
        if (!(ss >> n >> nnz) || n < 0 || nnz < 0)
            fail("expected 'n nnz'");
        break;
    }
    if (n < 0)
        fail("missing size line");
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(2 * nnz);
    for (long k = 0; k < nnz; ++k) {
        if (!std::getline(in, line))
            fail("unexpected end of file");
        ++lineno;
        const char* s = line.c_str();
        char* end = nullptr;
        long i = std::strtol(s, &end, 10);
        if (end == s)
            fail("bad row index");
        s = end;
        long j = std::strtol(s, &end, 10);
        if (end == s)
            fail("bad column index");
        s = end;
        double v = std::strtod(s, &end);
        if (end == s)
            fail("bad value");
        if (i < 0 || j < 0 || i >= n || j >= n || i > j)
            fail("entry outside the upper triangle");
        trip.emplace_back(i, j, v);
        if (i != j)
            trip.emplace_back(j, i, v);
    }
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

void save_coefficients(const Eigen::MatrixXd& rows, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw FormatError("cannot write " + path);
    out.write("PLTCOEF1", 8);
    std::uint64_t r = rows.rows(), c = rows.cols();
    out.write(reinterpret_cast<const char*>(&r), 8);
    out.write(reinterpret_cast<const char*>(&c), 8);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = rows;
    out.write(reinterpret_cast<const char*>(rm.data()), static_cast<std::streamsize>(rm.size() * sizeof(double)));
    if (!out)
        throw FormatError("failed writing " + path);
}

Eigen::MatrixXd load_coefficients(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError("cannot open " + path);
    char magic[8];
    std::uint64_t r = 0, c = 0;
    in.read(magic, 8);
    in.read(reinterpret_cast<char*>(&r), 8);
    in.read(reinterpret_cast<char*>(&c), 8);
    if (!in || std::memcmp(magic, "PLTCOEF1", 8) != 0)
        throw FormatError(path + ": not a coefficient file");
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(r, c);
    in.read(reinterpret_cast<char*>(rm.data()), static_cast<std::streamsize>(r * c * sizeof(double)));
    if (!in)
        throw FormatError(path + ": truncated coefficient file");
    return rm;
}

}  // namespace plates
