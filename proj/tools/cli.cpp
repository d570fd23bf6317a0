#include "cli.hpp"

#include "plates/hash.hpp"
#include "plates/sparse_io.hpp"
#include "plates/vtk.hpp"
#ifdef PLATES_HAS_ITERATE
#include "plates/iterate.hpp"
#endif

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

namespace plates::cli {

namespace {

namespace fs = std::filesystem;

std::string join_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::ofstream open_output(const std::string& path)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write " + path);
    return os;
}

void write_comments(std::ostream& os, const std::vector<std::string>& lines)
{
    for (const auto& l : lines)
        os << "# " << l << "\n";
}

std::uint64_t file_hash(const std::vector<std::string>& paths)
{
    Fnv1a h;
    for (const auto& p : paths) {
        std::ifstream is(p, std::ios::binary);
        if (!is)
            throw ConfigError("cannot read " + p);
        std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
        h.update(bytes);
    }
    return h.digest();
}

// field value at every vertex of kp, taken in its lowest tet
Eigen::MatrixX3d vertex_field(const SimplicialComplex3& kp, const BasisIndex& b, const Eigen::VectorXd& c)
{
    Eigen::MatrixX3d out(kp.num_vertices(), 3);
    for (int p = 0; p < kp.num_vertices(); ++p) {
        const int t = kp.first_tet_of_vertex(p);
        TetGeometry g = tet_geometry(kp, t);
        auto fields = local_fields(g);
        auto ids = local_basis_ids(kp, b, t);
        Eigen::Vector4d lam = Eigen::Vector4d::Zero();
        for (int l = 0; l < 4; ++l)
            if (kp.tet(t)[l] == p)
                lam[l] = 1.0;
        Vec3 v = Vec3::Zero();
        for (int a = 0; a < kLocalFields; ++a)
            v += c[ids[a]] * fields[a].value(lam);
        out.row(p) = v.transpose();
    }
    return out;
}

void print_counts(std::ostream& os, const std::string& name, const SimplicialComplex3& k)
{
    os << name << ": vertices " << k.num_vertices() << ", edges " << k.num_edges() << ", faces " << k.num_faces()
       << ", tets " << k.num_tets() << "\n";
    os << name << " boundary: vertices " << k.num_boundary_vertices() << ", edges " << k.num_boundary_edges()
       << ", faces " << k.num_boundary_faces() << "\n";
    os << name << " euler: bulk " << k.euler_characteristic() << ", boundary " << k.boundary_euler() << "\n";
}

std::string row_csv(double a, double b, const Eigen::VectorXd& c)
{
    std::string s = format_double(a) + "," + format_double(b);
    for (int r = 0; r < c.size(); ++r)
        s += "," + format_double(c[r]);
    return s;
}

ForcingSpec forcing_spec(const RunConfig& cfg, double f)
{
    ForcingSpec spec;
    spec.amplitude = cfg.amplitude;
    spec.direction = cfg.direction;
    spec.source_distance = cfg.source_distance;
    spec.frequency = f;
    spec.wave_speed = cfg.wave_speed;
    return spec;
}

EigenOptions eigen_options(const RunConfig& cfg)
{
    EigenOptions opt;
    opt.seed = cfg.seed;
    return opt;
}

// |sin(2 pi (x - x0) / L)| bands across x: nodal at x0 + m L / 2
int standing_wave_check(const RunConfig& cfg, const Pipeline& p, const std::string& out_dir, std::ostream& log)
{
    SampleSet s = far_side_samples(p.kp, p.coarse.basis, cfg.direction);
    if (s.points.empty())
        throw ConfigError("no boundary face faces the forcing direction");
    double x0 = s.points[0][0], x1 = x0;
    for (const auto& x : s.points) {
        x0 = std::min(x0, x[0]);
        x1 = std::max(x1, x[0]);
    }
    const double len = x1 - x0;
    if (!(len > 0))
        throw ConfigError("the sampled side has no extent along x");
    const double omega = 2 * M_PI * cfg.freq.front();
    auto times = sample_times(omega);
    Eigen::MatrixXd norms(static_cast<int>(s.points.size()), static_cast<int>(times.size()));
    for (std::size_t j = 0; j < times.size(); ++j)
        for (std::size_t q = 0; q < s.points.size(); ++q)
            norms(static_cast<int>(q), static_cast<int>(j)) =
                std::abs(std::cos(omega * times[j]) * std::sin(2 * M_PI * (s.points[q][0] - x0) / len));
    NodalMap map = classify_nodal(norms, cfg.c_omega);

    double diameter = 0;
    for (int f : s.faces) {
        const auto& v = p.kp.face(f);
        for (int a = 0; a < 3; ++a)
            diameter = std::max(diameter, (p.kp.vertex(v[a]) - p.kp.vertex(v[(a + 1) % 3])).norm());
    }
    const double bands[3] = {x0, x0 + 0.5 * len, x1};
    double worst = 0;
    for (std::size_t q = 0; q < s.points.size(); ++q) {
        if (!map.nodal[q])
            continue;
        double d = 1e300;
        for (double b : bands)
            d = std::min(d, std::abs(s.points[q][0] - b));
        worst = std::max(worst, d);
    }
    bool recovered = true;
    for (double b : bands) {
        double d = 1e300;
        for (std::size_t q = 0; q < s.points.size(); ++q)
            if (map.nodal[q])
                d = std::min(d, std::abs(s.points[q][0] - b));
        recovered = recovered && d <= diameter;
    }
    write_nodal_csv(join_path(out_dir, "nodal_standing_wave.csv"), s, map,
                    {"synthetic standing wave |cos(w t) sin(2 pi (x - x0) / L)|", "face diameter = " + format_double(diameter),
                     "max distance to a zero band = " + format_double(worst)});
    const bool ok = recovered && worst <= diameter;
    log << "standing wave: " << map.count() << " of " << s.points.size() << " samples nodal, max distance "
        << worst << " m, face diameter " << diameter << " m: " << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? 0 : 3;
}

struct NumericalFailure {
    std::string what;
    std::vector<std::string> details;
};

}  // namespace

Eigen::VectorXd Pipeline::to_coarse(const Eigen::VectorXd& c) const { return emb ? Eigen::VectorXd(emb->P * c) : c; }

Eigen::VectorXd Pipeline::to_system(const Eigen::VectorXd& f) const
{
    return emb ? Eigen::VectorXd(emb->P.transpose() * f) : f;
}

ElasticTensor resolve_material(const RunConfig& cfg)
{
    if (!cfg.material_file.empty())
        return load_material_file(cfg.material_file);
    return material_preset(cfg.material);
}

SimplicialComplex3 resolve_parent_mesh(const RunConfig& cfg)
{
    if (!cfg.mesh.empty())
        return load_mesh(cfg.mesh);
    return generate_slab_mesh(cfg.extent, cfg.block);
}

Pipeline build_pipeline(const RunConfig& cfg)
{
    Pipeline p;
    p.k = resolve_parent_mesh(cfg);
    p.kp = barycentric_subdivide(p.k);
    p.w = resolve_material(cfg);
    p.lambda = lambda_value(parse_lambda_preset(cfg.lambda), p.w);
    p.coarse = assemble_coarse(p.kp, p.w, p.lambda);
    if (cfg.system == "fine") {
        p.reduction = boundary_condition_system(p.kp, p.w, ConstraintKind::Traction);
        p.emb = fine_embedding(p.coarse.basis, *p.reduction);
        p.system = assemble_fine(p.coarse, *p.emb);
    } else {
        p.system = p.coarse;
    }
    return p;
}

std::vector<std::string> provenance(const std::string& command, const RunConfig& cfg, std::uint64_t mesh_hash,
                                    std::uint64_t material_hash)
{
    std::vector<std::string> out = {"plates " + command, "config-hash = " + hex64(cfg.hash()),
                                    "mesh-hash = " + hex64(mesh_hash), "material-hash = " + hex64(material_hash)};
    for (const auto& l : cfg.canonical())
        out.push_back(l);
    return out;
}

std::string frequency_tag(double f)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%gHz", f);
    return buf;
}

std::vector<ModesReport> run_modes(const RunConfig& cfg, const SparseMatrix& k, const SparseMatrix& i, double rho,
                                   const std::string& out_dir, const std::vector<std::string>& header,
                                   const std::string& label, std::ostream& log)
{
    std::vector<ModesReport> reports;
    auto summary = open_output(join_path(out_dir, "modes_" + label + ".csv"));
    write_comments(summary, header);
    summary << "f,mode,f_r,mu,residual,backward_error,oscillatory\n";
    for (double f : cfg.freq) {
        ModesReport rep;
        rep.f = f;
        rep.search = modes_near(k, i, rho, f, cfg.modes_per_freq, eigen_options(cfg));
        const auto& modes = rep.search.modes;
        const std::string stem = "modes_" + frequency_tag(f) + "_" + label;
        auto os = open_output(join_path(out_dir, stem + ".csv"));
        std::vector<std::string> lines = header;
        lines.push_back("f = " + format_double(f));
        lines.push_back("sigma = " + format_double(rep.search.sigma));
        lines.push_back("factorization = " + rep.search.factorization);
        if (rep.search.shift_perturbed)
            lines.push_back("warning: shift perturbed by 1e-8");
        Eigen::MatrixXd rows(static_cast<int>(modes.size()), k.rows());
        for (std::size_t m = 0; m < modes.size(); ++m) {
            lines.push_back("mode " + std::to_string(m) + ": mu = " + format_double(modes[m].mu) +
                            ", backward_error = " + format_double(modes[m].backward_error) +
                            (modes[m].oscillatory ? "" : ", decaying"));
            rows.row(static_cast<int>(m)) = modes[m].coeffs.transpose();
        }
        write_comments(os, lines);
        os << "f_r,residual";
        for (int r = 0; r < k.rows(); ++r)
            os << ",coeff_" << r;
        os << "\n";
        for (const auto& m : modes) {
            os << row_csv(m.f_r, m.residual, m.coeffs) << "\n";
            summary << format_double(f) << "," << (&m - modes.data()) << "," << format_double(m.f_r) << ","
                    << format_double(m.mu) << "," << format_double(m.residual) << ","
                    << format_double(m.backward_error) << "," << (m.oscillatory ? 1 : 0) << "\n";
            log << "f = " << f << " Hz: f_r = " << m.f_r << " Hz, mu = " << m.mu << ", residual = " << m.residual
                << "\n";
        }
        save_coefficients(rows, join_path(out_dir, stem + ".bin"));
        reports.push_back(std::move(rep));
    }
    return reports;
}

std::vector<ResonanceReport> run_resonate(const RunConfig& cfg, const Pipeline& p, const std::string& out_dir,
                                          bool vtk, std::ostream& log)
{
    const BasisIndex& b = p.coarse.basis;
    const double rho = p.w.density();
    const auto header = provenance("resonate", cfg, p.k.hash(), p.w.hash());
    SampleSet samples = far_side_samples(p.kp, b, cfg.direction);
    Eigen::VectorXd phi = flux_functional(p.kp, b);
    const WaveSign sign = parse_wave_sign(cfg.wave_sign);

    std::vector<ResonanceReport> reports;
    for (double f : cfg.freq) {
        ResonanceReport rep;
        rep.f = f;
        ForcingVectors fv = forcing_load_vectors(p.kp, b, forcing_spec(cfg, f));
        ModeSearch search = modes_near(p.system.K, p.system.I, rho, f, cfg.modes_per_freq, eigen_options(cfg));
        ResonanceWave wave = resonance_wave(p.system.K, p.system.I, rho, f, search.modes, p.to_system(fv.c1),
                                            p.to_system(fv.c2), sign);
        rep.warnings = wave.warnings;
        if (fv.c1.isZero(0.0) && fv.c2.isZero(0.0))
            rep.warnings.push_back("forcing vanishes; the wave is identically zero and every sample is nodal");
        rep.f_r = search.modes.empty() ? std::nan("") : search.modes.front().f_r;

        auto times = sample_times(wave.omega);
        std::vector<Eigen::VectorXd> coeffs;
        for (double t : times)
            coeffs.push_back(p.to_coarse(wave.coefficients(t)));
        Eigen::MatrixXd norms = sample_norms(samples, coeffs);
        NodalMap map = classify_nodal(norms, cfg.c_omega);
        std::vector<double> fluxes;
        for (const auto& c : coeffs)
            fluxes.push_back(phi.dot(c));
        rep.flux = flux_at_extreme_sample(map, times, fluxes);
        rep.nodal = map.count();
        rep.samples = static_cast<int>(samples.points.size());

        std::vector<std::string> lines = header;
        lines.push_back("f = " + format_double(f));
        for (const auto& m : wave.modes)
            lines.push_back("mode f_r = " + format_double(m.f_r) + ", prefactor = " + format_double(m.prefactor));
        lines.push_back("source = " + format_double(fv.source[0]) + " " + format_double(fv.source[1]) + " " +
                        format_double(fv.source[2]));
        lines.push_back("t_j index = " + std::to_string(rep.flux.index) + ", flux = " + format_double(rep.flux.flux) +
                        (rep.flux.ratio_fallback ? ", max_j fallback" : ""));
        for (const auto& w : rep.warnings)
            lines.push_back("warning: " + w);
        const std::string stem = frequency_tag(f) + "_" + cfg.system;
        write_nodal_csv(join_path(out_dir, "nodal_" + stem + ".csv"), samples, map, lines);
        if (vtk)
            write_vtk(join_path(out_dir, "wave_" + stem + ".vtk"), p.kp,
                      vertex_field(p.kp, b, coeffs[rep.flux.index - 1]),
                      "plates wave " + frequency_tag(f) + " config " + hex64(cfg.hash()));
        for (const auto& w : rep.warnings)
            log << "warning: " << w << "\n";
        log << "f = " << f << " Hz: f_r = " << rep.f_r << " Hz, " << rep.nodal << " of " << rep.samples
            << " samples nodal, flux " << rep.flux.flux << " at t_" << rep.flux.index << "\n";
        reports.push_back(std::move(rep));
    }
    auto os = open_output(join_path(out_dir, "flux.csv"));
    write_comments(os, header);
    os << "f,f_r,system,flux,t_j_index\n";
    for (const auto& r : reports)
        os << format_double(r.f) << "," << format_double(r.f_r) << "," << cfg.system << ","
           << format_double(r.flux.flux) << "," << r.flux.index << "\n";
    return reports;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Vibrations of thin elastic plates with Whitney elements"};
    app.require_subcommand(1);
    app.fallthrough();

    const std::vector<std::pair<std::string, int>> keys = {
        {"extent", 3},          {"block", 3},          {"mesh", 1},           {"material", 1},
        {"material-file", 1},   {"system", 1},         {"lambda", 1},         {"freq", 1},
        {"modes-per-freq", 1},  {"c-omega", 1},        {"wave-sign", 1},      {"source-distance", 1},
        {"wave-speed", 1},      {"amplitude", 3},      {"direction", 3},      {"threads", 1},
        {"seed", 1},            {"out", 1}};
    std::vector<std::vector<std::string>> values(keys.size());
    std::vector<CLI::Option*> opts;
    for (std::size_t q = 0; q < keys.size(); ++q) {
        auto* o = app.add_option("--" + keys[q].first, values[q]);
        o->expected(keys[q].second);
        opts.push_back(o);
    }
    std::string config_path;
    app.add_option("--config", config_path, "key = value file applied before the flags");

    auto* mesh_cmd = app.add_subcommand("mesh", "generate, subdivide or describe a mesh");
    mesh_cmd->require_subcommand(1);
    auto* mesh_slab = mesh_cmd->add_subcommand("slab", "write the slab mesh");
    std::string mesh_in;
    auto* mesh_sub = mesh_cmd->add_subcommand("subdivide", "barycentric subdivision of a mesh file");
    mesh_sub->add_option("file", mesh_in)->required();
    auto* mesh_info = mesh_cmd->add_subcommand("info", "counts of a mesh file and its subdivision");
    mesh_info->add_option("file", mesh_in)->required();

    auto* modes_cmd = app.add_subcommand("modes", "modes nearest each frequency");
    std::string import_k, import_i;
    modes_cmd->add_option("--import-k", import_k, "stiffness in plates-sym format");
    modes_cmd->add_option("--import-i", import_i, "Gram matrix in plates-sym format");

    auto* res_cmd = app.add_subcommand("resonate", "resonance waves, nodal maps and fluxes");
    bool vtk = false, standing = false;
    res_cmd->add_flag("--vtk", vtk, "write the wave at the flux sample time");
    res_cmd->add_flag("--standing-wave", standing, "classify a synthetic standing wave instead");

    auto* flux_cmd = app.add_subcommand("flux", "boundary flux of coefficient vectors");
    std::string coeff_path;
    bool position = false;
    flux_cmd->add_option("--coeffs", coeff_path, "PLTCOEF1 file, one vector per row");
    flux_cmd->add_flag("--position", position, "flux of the position field against 3 Vol");

    auto* export_cmd = app.add_subcommand("export", "write I and K in plates-sym format");

    auto* iter_cmd = app.add_subcommand("iterate", "first Newton iterate (experimental)");
    bool experimental = false;
    int steps = 20;
    iter_cmd->add_flag("--experimental", experimental, "acknowledge the experimental status");
    iter_cmd->add_option("--steps", steps, "time steps over one forcing period");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    RunConfig cfg;
    std::string out_dir = ".";
    std::string command = app.get_subcommands().front()->get_name();
    try {
        if (!config_path.empty())
            apply_config_file(cfg, config_path);
        for (std::size_t q = 0; q < keys.size(); ++q)
            if (opts[q]->count() > 0) {
                std::string v;
                for (const auto& s : values[q])
                    v += (v.empty() ? "" : " ") + s;
                cfg.set(keys[q].first, v);
            }
        cfg.validate();
        out_dir = resolve_out_dir(cfg);
        fs::create_directories(out_dir);
        set_thread_count(cfg.threads);
    } catch (const std::exception& e) {
        err << "configuration error: " << e.what() << "\n";
        return 2;
    }

    auto diagnostics = [&](const NumericalFailure& f) {
        try {
            auto os = open_output(join_path(out_dir, "diagnostics.txt"));
            os << "command: " << command << "\nerror: " << f.what << "\n";
            for (const auto& d : f.details)
                os << d << "\n";
            for (const auto& l : cfg.canonical())
                os << l << "\n";
        } catch (const std::exception&) {
        }
        err << "numerical failure: " << f.what << " (see " << join_path(out_dir, "diagnostics.txt") << ")\n";
        return 3;
    };

    try {
        if (mesh_cmd->parsed()) {
            if (mesh_slab->parsed()) {
                auto k = generate_slab_mesh(cfg.extent, cfg.block);
                save_mesh(k, join_path(out_dir, "slab.mesh"));
                print_counts(out, "K", k);
            } else if (mesh_sub->parsed()) {
                auto k = load_mesh(mesh_in);
                auto kp = barycentric_subdivide(k);
                save_mesh(kp, join_path(out_dir, fs::path(mesh_in).stem().string() + ".sub.mesh"));
                print_counts(out, "K'", kp);
            } else {
                auto k = load_mesh(mesh_in);
                print_counts(out, "K", k);
                print_counts(out, "K'", barycentric_subdivide(k));
            }
            return 0;
        }
        if (modes_cmd->parsed()) {
            if (import_k.empty() != import_i.empty())
                throw ConfigError("--import-k and --import-i go together");
            if (!import_k.empty()) {
                SparseMatrix k = load_symmetric(import_k), i = load_symmetric(import_i);
                if (k.rows() != i.rows())
                    throw ConfigError("imported matrices differ in size");
                ElasticTensor w = resolve_material(cfg);
                auto header = provenance("modes", cfg, file_hash({import_k, import_i}), w.hash());
                header.push_back("import-k = " + import_k);
                header.push_back("import-i = " + import_i);
                run_modes(cfg, k, i, w.density(), out_dir, header, "imported", out);
                return 0;
            }
            Pipeline p = build_pipeline(cfg);
            auto header = provenance("modes", cfg, p.k.hash(), p.w.hash());
            header.push_back("size = " + std::to_string(p.system.size()));
            run_modes(cfg, p.system.K, p.system.I, p.w.density(), out_dir, header, cfg.system, out);
            return 0;
        }
        if (res_cmd->parsed()) {
            Pipeline p = build_pipeline(cfg);
            if (standing)
                return standing_wave_check(cfg, p, out_dir, out);
            run_resonate(cfg, p, out_dir, vtk, out);
            return 0;
        }
        if (flux_cmd->parsed()) {
            Pipeline p = build_pipeline(cfg);
            const BasisIndex& b = p.coarse.basis;
            Eigen::VectorXd phi = flux_functional(p.kp, b);
            if (position) {
                Eigen::VectorXd x = position_coefficients(p.kp, b);
                out << "position flux " << format_double(phi.dot(x)) << ", 3 Vol "
                    << format_double(3 * p.kp.total_volume()) << "\n";
            }
            if (!coeff_path.empty()) {
                Eigen::MatrixXd rows = load_coefficients(coeff_path);
                if (rows.cols() != p.system.size() && rows.cols() != b.size())
                    throw ConfigError("coefficient length matches neither the coarse nor the fine basis");
                auto os = open_output(join_path(out_dir, "flux_rows.csv"));
                write_comments(os, provenance("flux", cfg, p.k.hash(), p.w.hash()));
                os << "row,flux\n";
                for (int r = 0; r < rows.rows(); ++r) {
                    Eigen::VectorXd c = rows.row(r).transpose();
                    double v = phi.dot(c.size() == b.size() ? c : p.to_coarse(c));
                    os << r << "," << format_double(v) << "\n";
                    out << "row " << r << ": flux " << format_double(v) << "\n";
                }
            }
            return 0;
        }
        if (export_cmd->parsed()) {
            Pipeline p = build_pipeline(cfg);
            auto header = provenance("export", cfg, p.k.hash(), p.w.hash());
            save_symmetric(p.system.I, join_path(out_dir, "I_" + cfg.system + ".sym"), header);
            save_symmetric(p.system.K, join_path(out_dir, "K_" + cfg.system + ".sym"), header);
            out << "size " << p.system.size() << ", sparsity I " << sparsity_score(p.system.I) << ", sparsity K "
                << sparsity_score(p.system.K) << "\n";
            return 0;
        }
        if (iter_cmd->parsed()) {
#ifdef PLATES_HAS_ITERATE
            if (!experimental)
                throw ConfigError("iterate is experimental; pass --experimental");
            if (steps < 1)
                throw ConfigError("--steps must be positive");
            Pipeline p = build_pipeline(cfg);
            const BasisIndex& b = p.coarse.basis;
            const double rho = p.w.density(), f = cfg.freq.front();
            ForcingVectors fv = forcing_load_vectors(p.kp, b, forcing_spec(cfg, f));
            ModeSearch search = modes_near(p.system.K, p.system.I, rho, f, cfg.modes_per_freq, eigen_options(cfg));
            ResonanceWave wave = resonance_wave(p.system.K, p.system.I, rho, f, search.modes, p.to_system(fv.c1),
                                                p.to_system(fv.c2), parse_wave_sign(cfg.wave_sign));
            wave.c1 = p.to_coarse(wave.c1);
            wave.c2 = p.to_coarse(wave.c2);
            // the exact single-mode motion, so that the velocity is consistent
            wave.apply_prefactor = false;
            IterateSolution sol = first_iterate(p.kp, p.w, rho, wave, fv, iterate_times(wave.omega, steps));
            std::vector<std::string> lines = provenance("iterate", cfg, p.k.hash(), p.w.hash());
            lines.push_back("f = " + format_double(f));
            lines.push_back("lambda_max = " + format_double(sol.lambda_max));
            lines.push_back("gamma^2 rho = " + format_double(sol.g));
            lines.push_back("gamma = " + format_double(std::sqrt(sol.g / rho)));
            lines.push_back("negative pivots = " + std::to_string(sol.negative_pivots));
            lines.push_back("pressure: P1 Dirichlet solve of rho tr((grad u)^2)");
            lines.push_back("time integrals: trapezoid on the output grid");
            lines.push_back("coefficients: Z = x + xi over the coarse basis");
            for (const auto& w : sol.warnings)
                lines.push_back("warning: " + w);
            auto os = open_output(join_path(out_dir, "iterate.csv"));
            write_comments(os, lines);
            os << "t";
            for (int r = 0; r < b.size(); ++r)
                os << ",coeff_" << r;
            os << "\n";
            Eigen::MatrixXd rows(static_cast<int>(sol.times.size()), b.size());
            for (std::size_t j = 0; j < sol.times.size(); ++j) {
                Eigen::VectorXd z = sol.z(static_cast<int>(j));
                rows.row(static_cast<int>(j)) = z.transpose();
                os << format_double(sol.times[j]);
                for (int r = 0; r < z.size(); ++r)
                    os << "," << format_double(z[r]);
                os << "\n";
            }
            save_coefficients(rows, join_path(out_dir, "iterate.bin"));
            for (const auto& w : sol.warnings)
                out << "warning: " << w << "\n";
            out << "iterate: " << sol.times.size() << " times, gamma^2 rho = " << sol.g << "\n";
            return 0;
#else
            (void)experimental;
            throw ConfigError("this build has no iterate support");
#endif
        }
    } catch (const ConvergenceError& e) {
        NumericalFailure f{e.what(), {}};
        std::string r = "best residuals:";
        for (double v : e.residuals)
            r += " " + format_double(v);
        f.details.push_back(r);
        return diagnostics(f);
    } catch (const FactorizationError& e) {
        return diagnostics({e.what(), {}});
    } catch (const MemoryBudgetError& e) {
        return diagnostics({e.what(), {}});
    } catch (const ConstraintError& e) {
        return diagnostics({e.what(), {}});
#ifdef PLATES_HAS_ITERATE
    } catch (const SpectralBoundError& e) {
        return diagnostics({e.what(), {}});
#endif
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace plates::cli
