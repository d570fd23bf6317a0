#pragma once

#include "plates/assembly.hpp"
#include "plates/eigensolve.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <string>
#include <vector>

namespace plates {

// Plane pressure wave F0 sin(k (x - s).d -+ w t) from a source s placed
// `source_distance` in front of the body along -d.
struct ForcingSpec {
    Vec3 amplitude = Vec3(0, 1, 0);  // F0, N/m^3
    Vec3 direction = Vec3(0, 1, 0);  // d, unit
    double source_distance = 0.62;   // m
    double frequency = 147;          // Hz
    double wave_speed = 343;         // m/s

    double omega() const;
    double wavenumber() const;
    void validate() const;
};

// Source point for a body: the entry point is the bounding box centre moved
// back along -d to the last vertex, the source sits source_distance behind it.
Vec3 forcing_source(const SimplicialComplex3& k, const ForcingSpec& spec);

// C1 = <F0 sin(k (x - s).d), W_s>, C2 = <F0 cos(k (x - s).d), W_s> over the
// coarse basis.
struct ForcingVectors {
    Eigen::VectorXd c1, c2;
    Vec3 source;
};
ForcingVectors forcing_load_vectors(const SimplicialComplex3& kp, const BasisIndex& b, const ForcingSpec& spec,
                                    int gm_s = 3, Execution ex = Execution::Parallel);

enum class WaveSign { Plus, Minus };
WaveSign parse_wave_sign(const std::string& s);
std::string to_string(WaveSign s);

struct WaveMode {
    double omega_r = 0;
    double f_r = 0;
    // 1 / (omega_r^2 - omega^2)
    double prefactor = 0;
    bool near_resonance = false;
};

// Sum over modes of
//   p_r (c1 (cos wt - cos w_r t) +- c2 ((w / w_r) sin w_r t - sin wt))
// with -(w^2 rho I + K) c_j = C_j.  The upper sign goes with WaveSign::Minus
// (forcing C1 cos wt - C2 sin wt).
struct ResonanceWave {
    double omega = 0;
    WaveSign sign = WaveSign::Minus;
    Eigen::VectorXd c1, c2;
    std::vector<WaveMode> modes;
    std::vector<std::string> warnings;
    bool apply_prefactor = true;

    Eigen::VectorXd coefficients(double t) const;
    Eigen::VectorXd velocity(double t) const;
    bool empty() const { return modes.empty(); }
};

// Builds the wave from the modes nearest f.  Modes with mu >= 0 do not
// oscillate and are skipped with a warning.
ResonanceWave resonance_wave(const SparseMatrix& k, const SparseMatrix& i, double rho, double f,
                             const std::vector<ModeResult>& modes, const Eigen::VectorXd& c1,
                             const Eigen::VectorXd& c2, WaveSign sign = WaveSign::Minus,
                             const FactorizeOptions& opt = {});

// t_j = j 2 pi / (10 w), j = 1..10
std::vector<double> sample_times(double omega, int count = 10);

// Vertices and barycentres of the K' boundary faces whose exterior normal
// has positive component along d, each evaluated in its lowest tet.
struct SampleSet {
    std::vector<Vec3> points;
    std::vector<int> tets;
    // rows 3p..3p+2 give the field value at point p from coarse coefficients
    SparseMatrix op;
    std::vector<int> faces;  // K' boundary faces used
};
SampleSet far_side_samples(const SimplicialComplex3& kp, const BasisIndex& b, const Vec3& direction);

// |W(t_j, x_p)|, one column per time
Eigen::MatrixXd sample_norms(const SampleSet& s, const std::vector<Eigen::VectorXd>& coeffs);

struct NodalMap {
    std::vector<bool> nodal;
    Eigen::VectorXd min_overall;  // per point minimum over the times
    std::vector<double> max_t, min_t, delta_t;
    double c_omega = 0.05;
    int count() const;
};
// nodal at t_j when |W| <= min_j + c_omega delta_j, delta_j = (max_j - min_j) / 10;
// nodal when nodal at every t_j
NodalMap classify_nodal(const Eigen::MatrixXd& norms, double c_omega);

// Phi . c is the exact boundary flux of the coarse field with coefficients c
Eigen::VectorXd flux_functional(const SimplicialComplex3& kp, const BasisIndex& b);
// exact for fields affine on each boundary face
double boundary_flux(const SimplicialComplex3& kp, const VectorField& u);

// Table flux protocol: the t_j maximising max_j / min_j (or max_j when some
// min_j vanishes) and the flux there
struct FluxAtSample {
    int index = 0;  // 1-based
    double time = 0;
    double flux = 0;
    bool ratio_fallback = false;
};
FluxAtSample flux_at_extreme_sample(const NodalMap& map, const std::vector<double>& times,
                                    const std::vector<double>& fluxes);

void write_nodal_csv(const std::string& path, const SampleSet& s, const NodalMap& map,
                     const std::vector<std::string>& header);

}  // namespace plates
