#pragma once

#include "run_config.hpp"

#include "plates/assembly.hpp"
#include "plates/boundary_conditions.hpp"
#include "plates/eigensolve.hpp"
#include "plates/resonance.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace plates::cli {

// Mesh, material and the system selected by the config.  For the fine
// system, `emb` maps its coefficients back to the coarse basis.
struct Pipeline {
    SimplicialComplex3 k, kp;
    ElasticTensor w;
    double lambda = 1;
    SparseSymSystem coarse;
    std::optional<ConstraintReduction> reduction;
    std::optional<FineEmbedding> emb;
    SparseSymSystem system;
    bool fine() const { return emb.has_value(); }
    // coarse coefficients of a system coefficient vector
    Eigen::VectorXd to_coarse(const Eigen::VectorXd& c) const;
    // system load vector of a coarse one
    Eigen::VectorXd to_system(const Eigen::VectorXd& f) const;
};

ElasticTensor resolve_material(const RunConfig& cfg);
SimplicialComplex3 resolve_parent_mesh(const RunConfig& cfg);
Pipeline build_pipeline(const RunConfig& cfg);

// provenance lines written as '#' comments at the top of every output
std::vector<std::string> provenance(const std::string& command, const RunConfig& cfg, std::uint64_t mesh_hash,
                                    std::uint64_t material_hash);

std::string frequency_tag(double f);

struct ModesReport {
    double f = 0;
    ModeSearch search;
};
std::vector<ModesReport> run_modes(const RunConfig& cfg, const SparseMatrix& k, const SparseMatrix& i, double rho,
                                   const std::string& out_dir, const std::vector<std::string>& header,
                                   const std::string& label, std::ostream& log);

struct ResonanceReport {
    double f = 0;
    double f_r = 0;
    FluxAtSample flux;
    int nodal = 0;
    int samples = 0;
    std::vector<std::string> warnings;
};
std::vector<ResonanceReport> run_resonate(const RunConfig& cfg, const Pipeline& p, const std::string& out_dir,
                                          bool vtk, std::ostream& log);

// Parses argv and runs one subcommand.  Returns 0 on success, 2 on
// configuration errors and 3 on numerical failure; failures leave a
// diagnostics.txt in the output directory.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace plates::cli
