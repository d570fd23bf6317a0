#include "plates/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace plates {

double ForcingSpec::omega() const { return 2 * M_PI * frequency; }

double ForcingSpec::wavenumber() const { return omega() / wave_speed; }

void ForcingSpec::validate() const
{
    if (std::abs(direction.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("forcing direction must be a unit vector");
    if (!(frequency > 0))
        throw std::invalid_argument("forcing frequency must be positive");
    if (!(wave_speed > 0))
        throw std::invalid_argument("wave speed must be positive");
    if (!(source_distance >= 0))
        throw std::invalid_argument("source distance must be non-negative");
}

Vec3 forcing_source(const SimplicialComplex3& k, const ForcingSpec& spec)
{
    Vec3 lo = k.vertex(0), hi = k.vertex(0);
    for (const Vec3& x : k.vertices()) {
        lo = lo.cwiseMin(x);
        hi = hi.cwiseMax(x);
    }
    const Vec3 c = 0.5 * (lo + hi);
    double h = 0;
    for (const Vec3& x : k.vertices())
        h = std::max(h, (c - x).dot(spec.direction));
    return c - (h + spec.source_distance) * spec.direction;
}

ForcingVectors forcing_load_vectors(const SimplicialComplex3& kp, const BasisIndex& b, const ForcingSpec& spec,
                                    int gm_s, Execution ex)
{
    spec.validate();
    ForcingVectors out;
    out.source = forcing_source(kp, spec);
    const double kw = spec.wavenumber();
    const Vec3 s = out.source, d = spec.direction, f0 = spec.amplitude;
    out.c1 = load_vector(kp, b, [&](const Vec3& x) { return Vec3(f0 * std::sin(kw * (x - s).dot(d))); }, gm_s, ex);
    out.c2 = load_vector(kp, b, [&](const Vec3& x) { return Vec3(f0 * std::cos(kw * (x - s).dot(d))); }, gm_s, ex);
    return out;
}

WaveSign parse_wave_sign(const std::string& s)
{
    if (s == "plus")
        return WaveSign::Plus;
    if (s == "minus")
        return WaveSign::Minus;
    throw std::invalid_argument("wave sign must be plus or minus, got '" + s + "'");
}

std::string to_string(WaveSign s) { return s == WaveSign::Plus ? "plus" : "minus"; }

Eigen::VectorXd ResonanceWave::coefficients(double t) const
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(c1.size());
    const double s = sign == WaveSign::Minus ? 1.0 : -1.0;
    for (const auto& m : modes) {
        const double p = apply_prefactor ? m.prefactor : 1.0;
        const double a = std::cos(omega * t) - std::cos(m.omega_r * t);
        const double b = omega / m.omega_r * std::sin(m.omega_r * t) - std::sin(omega * t);
        out += p * a * c1 + (p * s * b) * c2;
    }
    return out;
}

Eigen::VectorXd ResonanceWave::velocity(double t) const
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(c1.size());
    const double s = sign == WaveSign::Minus ? 1.0 : -1.0;
    for (const auto& m : modes) {
        const double p = apply_prefactor ? m.prefactor : 1.0;
        const double a = -omega * std::sin(omega * t) + m.omega_r * std::sin(m.omega_r * t);
        const double b = omega * std::cos(m.omega_r * t) - omega * std::cos(omega * t);
        out += p * a * c1 + (p * s * b) * c2;
    }
    return out;
}

ResonanceWave resonance_wave(const SparseMatrix& k, const SparseMatrix& i, double rho, double f,
                             const std::vector<ModeResult>& modes, const Eigen::VectorXd& c1,
                             const Eigen::VectorXd& c2, WaveSign sign, const FactorizeOptions& opt)
{
    if (!(f > 0))
        throw std::invalid_argument("forcing frequency must be positive");
    if (c1.size() != k.rows() || c2.size() != k.rows())
        throw std::invalid_argument("load vectors do not match the system size");
    ResonanceWave w;
    w.omega = 2 * M_PI * f;
    w.sign = sign;
    SparseMatrix m = rho * i;
    bool perturbed = false;
    auto fac = factorize_shifted(k, m, -w.omega * w.omega, opt, &perturbed);
    if (perturbed)
        w.warnings.push_back("forcing frequency is a generalized eigenvalue; shift perturbed by 1e-8");
    w.c1 = -fac->solve(c1);
    w.c2 = -fac->solve(c2);
    const double w2 = w.omega * w.omega;
    for (const auto& mode : modes) {
        if (!mode.oscillatory) {
            std::ostringstream msg;
            msg << "mode with mu = " << mode.mu << " >= 0 decays and is left out of the wave";
            w.warnings.push_back(msg.str());
            continue;
        }
        WaveMode wm;
        wm.f_r = mode.f_r;
        wm.omega_r = 2 * M_PI * mode.f_r;
        const double gap = wm.omega_r * wm.omega_r - w2;
        wm.prefactor = 1.0 / gap;
        if (std::abs(gap) < 1e-6 * w2) {
            wm.near_resonance = true;
            std::ostringstream msg;
            msg << "near resonance: f_r = " << mode.f_r << " Hz, prefactor " << wm.prefactor;
            w.warnings.push_back(msg.str());
        }
        w.modes.push_back(wm);
    }
    if (w.modes.empty())
        w.warnings.push_back("no oscillatory mode; the wave vanishes identically");
    return w;
}

std::vector<double> sample_times(double omega, int count)
{
    std::vector<double> t(count);
    for (int j = 1; j <= count; ++j)
        t[j - 1] = j * 2 * M_PI / (count * omega);
    return t;
}

SampleSet far_side_samples(const SimplicialComplex3& kp, const BasisIndex& b, const Vec3& direction)
{
    SampleSet s;
    std::set<int> verts;
    for (int f : kp.boundary_faces())
        if (kp.exterior_normal(f).dot(direction) > 1e-12) {
            s.faces.push_back(f);
            for (int p : kp.face(f))
                verts.insert(p);
        }

    std::vector<Eigen::Triplet<double>> trip;
    auto add_point = [&](const Vec3& x, int t, const Eigen::Vector4d& lam) {
        const int row = static_cast<int>(s.points.size());
        s.points.push_back(x);
        s.tets.push_back(t);
        TetGeometry g = tet_geometry(kp, t);
        auto fields = local_fields(g);
        auto ids = local_basis_ids(kp, b, t);
        for (int a = 0; a < kLocalFields; ++a) {
            Vec3 v = fields[a].value(lam);
            for (int r = 0; r < 3; ++r)
                if (v[r] != 0.0)
                    trip.emplace_back(3 * row + r, ids[a], v[r]);
        }
    };
    for (int p : verts) {
        int t = kp.first_tet_of_vertex(p);
        Eigen::Vector4d lam = Eigen::Vector4d::Zero();
        for (int l = 0; l < 4; ++l)
            if (kp.tet(t)[l] == p)
                lam[l] = 1.0;
        add_point(kp.vertex(p), t, lam);
    }
    for (int f : s.faces) {
        BoundaryFace bf = boundary_face(kp, f);
        Eigen::Vector4d lam = Eigen::Vector4d::Constant(1.0 / 3.0);
        lam[bf.opposite] = 0.0;
        const auto& fv = kp.face(f);
        Vec3 x = (kp.vertex(fv[0]) + kp.vertex(fv[1]) + kp.vertex(fv[2])) / 3.0;
        add_point(x, bf.tet, lam);
    }
    s.op.resize(3 * static_cast<int>(s.points.size()), b.size());
    s.op.setFromTriplets(trip.begin(), trip.end());
    return s;
}

Eigen::MatrixXd sample_norms(const SampleSet& s, const std::vector<Eigen::VectorXd>& coeffs)
{
    const int np = static_cast<int>(s.points.size());
    Eigen::MatrixXd out(np, static_cast<int>(coeffs.size()));
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        Eigen::VectorXd v = s.op * coeffs[j];
        for (int p = 0; p < np; ++p)
            out(p, static_cast<int>(j)) = v.segment<3>(3 * p).norm();
    }
    return out;
}

int NodalMap::count() const { return static_cast<int>(std::count(nodal.begin(), nodal.end(), true)); }

NodalMap classify_nodal(const Eigen::MatrixXd& norms, double c_omega)
{
    if (!(c_omega >= 0))
        throw std::invalid_argument("c_omega must be non-negative");
    NodalMap map;
    map.c_omega = c_omega;
    const int np = static_cast<int>(norms.rows()), nt = static_cast<int>(norms.cols());
    map.nodal.assign(np, true);
    map.min_overall = np > 0 && nt > 0 ? Eigen::VectorXd(norms.rowwise().minCoeff()) : Eigen::VectorXd::Zero(np);
    for (int j = 0; j < nt; ++j) {
        double mx = np ? norms.col(j).maxCoeff() : 0.0;
        double mn = np ? norms.col(j).minCoeff() : 0.0;
        double delta = (mx - mn) / 10.0;
        map.max_t.push_back(mx);
        map.min_t.push_back(mn);
        map.delta_t.push_back(delta);
        if (delta == 0.0)
            continue;
        const double cut = mn + c_omega * delta;
        for (int p = 0; p < np; ++p)
            if (norms(p, j) > cut)
                map.nodal[p] = false;
    }
    return map;
}

Eigen::VectorXd flux_functional(const SimplicialComplex3& kp, const BasisIndex& b)
{
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(b.size());
    for (int f : kp.boundary_faces()) {
        BoundaryFace bf = boundary_face(kp, f);
        TetGeometry g = tet_geometry(kp, bf.tet);
        auto fields = local_fields(g);
        auto ids = local_basis_ids(kp, b, bf.tet);
        for (int a = 0; a < kLocalFields; ++a)
            phi[ids[a]] += face_integral(fields[a], bf).dot(bf.normal);
    }
    return phi;
}

double boundary_flux(const SimplicialComplex3& kp, const VectorField& u)
{
    double total = 0;
    for (int f : kp.boundary_faces()) {
        const auto& fv = kp.face(f);
        Vec3 x = (kp.vertex(fv[0]) + kp.vertex(fv[1]) + kp.vertex(fv[2])) / 3.0;
        total += kp.face_area(f) * u(x).dot(kp.exterior_normal(f));
    }
    return total;
}

FluxAtSample flux_at_extreme_sample(const NodalMap& map, const std::vector<double>& times,
                                    const std::vector<double>& fluxes)
{
    if (times.size() != map.max_t.size() || fluxes.size() != times.size() || times.empty())
        throw std::invalid_argument("flux samples do not match the nodal map");
    FluxAtSample out;
    out.ratio_fallback = std::any_of(map.min_t.begin(), map.min_t.end(), [](double m) { return m == 0.0; });
    int best = 0;
    double score = -1;
    for (std::size_t j = 0; j < times.size(); ++j) {
        double v = out.ratio_fallback ? map.max_t[j] : map.max_t[j] / map.min_t[j];
        if (v > score) {
            score = v;
            best = static_cast<int>(j);
        }
    }
    out.index = best + 1;
    out.time = times[best];
    out.flux = fluxes[best];
    return out;
}

void write_nodal_csv(const std::string& path, const SampleSet& s, const NodalMap& map,
                     const std::vector<std::string>& header)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write " + path);
    for (const auto& h : header)
        os << "# " << h << "\n";
    os << "x,y,z,nodal,min_overall_norm\n";
    char buf[160];
    for (std::size_t p = 0; p < s.points.size(); ++p) {
        const Vec3& x = s.points[p];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d,%.17g\n", x[0], x[1], x[2], map.nodal[p] ? 1 : 0,
                      map.min_overall[static_cast<int>(p)]);
        os << buf;
    }
}

}  // namespace plates
