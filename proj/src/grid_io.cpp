#include <cstdint>
#include <cstring>
#include <fstream>

#include <fmt/format.h>

#include "osqm/wigner_weyl.hpp"

namespace osqm {

namespace {
constexpr std::uint32_t kDumpVersion = 1;

template <class T>
void put(std::ofstream& f, T v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& f) {
    T v;
    if (!f.read(reinterpret_cast<char*>(&v), sizeof v)) throw ValidationError("grid dump: truncated header");
    return v;
}
}  // namespace

void write_grid_dump(const std::string& path, const PhaseGrid& g, const std::vector<double>& values) {
    if (values.size() != g.size()) throw ValidationError("grid dump: value count does not match grid");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("grid dump: cannot open " + path);
    f.write("OSQM", 4);
    put<std::uint32_t>(f, kDumpVersion);
    put<std::uint32_t>(f, g.dof());
    put<std::uint32_t>(f, g.N());
    put<double>(f, g.hbar());
    for (int i = 0; i < 2; ++i) {
        put<double>(f, i < g.dof() ? g.axis(i).x_ext : 0.0);
        put<double>(f, i < g.dof() ? g.axis(i).p_ext : 0.0);
    }
    f.write(reinterpret_cast<const char*>(values.data()), values.size() * sizeof(double));
}

std::vector<double> read_grid_dump(const std::string& path, PhaseGrid& g) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("grid dump: cannot open " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "OSQM", 4) != 0) throw ValidationError("grid dump: bad magic");
    if (get<std::uint32_t>(f) != kDumpVersion) throw ValidationError("grid dump: unsupported version");
    int n = (int)get<std::uint32_t>(f);
    int N = (int)get<std::uint32_t>(f);
    double hbar = get<double>(f);
    std::vector<double> xe;
    for (int i = 0; i < 2; ++i) {
        double x = get<double>(f);
        get<double>(f);
        if (i < n) xe.push_back(x);
    }
    g = PhaseGrid(n, N, hbar, xe);
    std::vector<double> v(g.size());
    if (!f.read(reinterpret_cast<char*>(v.data()), v.size() * sizeof(double)))
        throw ValidationError("grid dump: truncated values");
    return v;
}

void write_marginals_csv(const std::string& path, const WignerState& W) {
    const PhaseGrid& g = W.grid;
    Marginals m = marginals(W);
    std::ofstream f(path);
    if (!f) throw ValidationError("marginals: cannot open " + path);
    const int N = g.N();
    if (g.dof() == 1) {
        f << "index,x,position_density,p,momentum_density\n";
        for (int a = 0; a < N; ++a)
            f << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g}\n", a, g.axis(0).x(a), m.position[a], g.axis(0).p(a),
                             m.momentum[a]);
    } else {
        f << "i1,i2,x1,x2,position_density,p1,p2,momentum_density\n";
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b)
                f << fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", a, b, g.axis(0).x(a),
                                 g.axis(1).x(b), m.position[a * N + b], g.axis(0).p(a), g.axis(1).p(b),
                                 m.momentum[a * N + b]);
    }
}

}  // namespace osqm
