#include "plates/material.hpp"
#include "plates/hash.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace plates {

namespace {

int voigt_index(int i, int j)
{
    if (i == j)
        return i;
    if (i > j)
        std::swap(i, j);
    if (i == 1 && j == 2)
        return 3;
    if (i == 0 && j == 2)
        return 4;
    return 5;
}

std::string trim(const std::string& s)
{
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& v)
{
    std::size_t pos = 0;
    double x = 0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size() || !std::isfinite(x))
        throw MaterialError("material value for '" + key + "' is not a number: " + v);
    return x;
}

}  // namespace

ElasticTensor::ElasticTensor(const Matrix6d& voigt, double density, std::string name)
    : c_(voigt), rho_(density), name_(std::move(name))
{
    if (!(density > 0))
        throw MaterialError("density must be positive");
    if ((c_ - c_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * c_.cwiseAbs().maxCoeff())
        throw MaterialError("moduli matrix is not symmetric");
    c_ = 0.5 * (c_ + c_.transpose()).eval();
}

double ElasticTensor::operator()(int i, int j, int k, int l) const
{
    return c_(voigt_index(i, j), voigt_index(k, l));
}

Eigen::Matrix3d ElasticTensor::stress(const Eigen::Matrix3d& grad) const
{
    Eigen::Matrix3d eps = 0.5 * (grad + grad.transpose());
    Eigen::Matrix<double, 6, 1> e;
    e << eps(0, 0), eps(1, 1), eps(2, 2), 2 * eps(1, 2), 2 * eps(0, 2), 2 * eps(0, 1);
    Eigen::Matrix<double, 6, 1> s = c_ * e;
    Eigen::Matrix3d sig;
    sig << s[0], s[5], s[4],
           s[5], s[1], s[3],
           s[4], s[3], s[2];
    return sig;
}

double ElasticTensor::contract(const Eigen::Matrix3d& ga, const Eigen::Matrix3d& gb) const
{
    // C has the minor symmetries, so this is eps(a) : C : eps(b)
    return (ga.array() * stress(gb).array()).sum();
}

Eigen::Vector3d ElasticTensor::boundary_contraction(const Eigen::Vector3d& n) const
{
    Eigen::Vector3d rows = normal_block().rowwise().sum();
    return rows.cwiseProduct(n);
}

Eigen::Vector3d ElasticTensor::l_constants() const
{
    if (l_override_)
        return *l_override_;
    return weighted_divergence_constants(*this);
}

std::uint64_t ElasticTensor::hash() const
{
    Fnv1a h;
    h.update(name_);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            h.update_double(c_(i, j));
    h.update_double(rho_);
    Eigen::Vector3d l = l_constants();
    for (int i = 0; i < 3; ++i)
        h.update_double(l[i]);
    return h.digest();
}

ElasticTensor tensor_from_engineering(const EngineeringConstants& k, double density, std::string name)
{
    const double e[3] = {k.e_r, k.e_theta, k.e_z};
    const double g[3] = {k.g_theta_z, k.g_rz, k.g_r_theta};
    for (double x : e)
        if (!(x > 0))
            throw MaterialError("elastic moduli must be positive");
    for (double x : g)
        if (!(x > 0))
            throw MaterialError("singular compliance: shear diagonal has a non-positive modulus");

    // mu[a][b]: contraction along b for tension along a
    double mu[3][3] = {{0, k.mu_r_theta, k.mu_r_z}, {k.mu_theta_r, 0, k.mu_theta_z}, {k.mu_z_r, k.mu_z_theta, 0}};
    Eigen::Matrix3d u = Eigen::Matrix3d::Zero();
    for (int a = 0; a < 3; ++a)
        u(a, a) = 1.0 / e[a];
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            double m = 0.5 * (mu[a][b] / e[a] + mu[b][a] / e[b]);
            u(a, b) = u(b, a) = -m;
        }
    Eigen::FullPivLU<Eigen::Matrix3d> lu(u);
    if (!lu.isInvertible() || lu.rcond() < 1e-14)
        throw MaterialError("singular compliance: normal 3x3 block is not invertible");

    Matrix6d c = Matrix6d::Zero();
    c.topLeftCorner<3, 3>() = lu.inverse();
    for (int a = 0; a < 3; ++a)
        c(3 + a, 3 + a) = g[a];
    return ElasticTensor(c, density, std::move(name));
}

EngineeringConstants engineering_from_tensor(const ElasticTensor& w)
{
    Eigen::Matrix3d u = w.normal_block().inverse();
    EngineeringConstants k;
    k.e_r = 1.0 / u(0, 0);
    k.e_theta = 1.0 / u(1, 1);
    k.e_z = 1.0 / u(2, 2);
    Eigen::Vector3d g = w.shear_diagonal();
    k.g_theta_z = g[0];
    k.g_rz = g[1];
    k.g_r_theta = g[2];
    k.mu_r_theta = -u(0, 1) * k.e_r;
    k.mu_theta_r = -u(1, 0) * k.e_theta;
    k.mu_r_z = -u(0, 2) * k.e_r;
    k.mu_z_r = -u(2, 0) * k.e_z;
    k.mu_theta_z = -u(1, 2) * k.e_theta;
    k.mu_z_theta = -u(2, 1) * k.e_z;
    return k;
}

Eigen::Matrix<double, 6, 1> coercivity_spectrum(const ElasticTensor& w)
{
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(w.normal_block(), Eigen::EigenvaluesOnly);
    Eigen::Vector3d s = w.shear_diagonal();
    std::sort(s.data(), s.data() + 3);
    Eigen::Matrix<double, 6, 1> out;
    out << es.eigenvalues(), s;
    return out;
}

Eigen::Vector3d weighted_divergence_constants(const ElasticTensor& w)
{
    Eigen::Vector3d l;
    for (int i = 0; i < 3; ++i) {
        double sum = 0;
        for (int j = 0; j < 3; ++j)
            sum += (i == j) ? w(i, i, i, i) : 2 * w(i, j, i, j) + w(i, i, j, j);
        l[i] = sum / 3.0;
    }
    return l;
}

EngineeringConstants spruce_engelmann_constants()
{
    const double ez = 9790e6;
    EngineeringConstants k;
    k.e_z = ez;
    k.e_theta = 0.059 * ez;
    k.e_r = 0.128 * ez;
    k.g_rz = 0.124 * ez;
    k.g_theta_z = 0.120 * ez;
    k.g_r_theta = 0.010 * ez;
    k.mu_z_r = 0.422;
    k.mu_z_theta = 0.462;
    k.mu_r_theta = 0.530;
    k.mu_theta_r = 0.255;
    k.mu_r_z = 0.083;
    k.mu_theta_z = 0.058;
    return k;
}

ElasticTensor spruce_engelmann()
{
    return tensor_from_engineering(spruce_engelmann_constants(), 360.0, "spruce-engelmann");
}

ElasticTensor isotropic(double e, double g, double nu, double density)
{
    EngineeringConstants k;
    k.e_r = k.e_theta = k.e_z = e;
    k.g_theta_z = k.g_rz = k.g_r_theta = g;
    k.mu_r_theta = k.mu_theta_r = k.mu_r_z = k.mu_z_r = k.mu_theta_z = k.mu_z_theta = nu;
    std::ostringstream name;
    name.precision(17);
    name << "isotropic:" << e << "," << g << "," << nu << "," << density;
    return tensor_from_engineering(k, density, name.str());
}

ElasticTensor material_preset(const std::string& id)
{
    if (id == "spruce-engelmann")
        return spruce_engelmann();
    const std::string pre = "isotropic:";
    if (id.rfind(pre, 0) == 0) {
        std::vector<double> v;
        std::stringstream ss(id.substr(pre.size()));
        std::string tok;
        while (std::getline(ss, tok, ','))
            v.push_back(parse_number("isotropic", trim(tok)));
        if (v.size() < 2 || v.size() > 4)
            throw MaterialError("isotropic material expects e,g[,nu[,rho]]");
        return isotropic(v[0], v[1], v.size() > 2 ? v[2] : 0.0, v.size() > 3 ? v[3] : 1000.0);
    }
    throw MaterialError("unknown material '" + id + "'");
}

ElasticTensor load_material_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw MaterialError("cannot open material file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw MaterialError(path + ":" + std::to_string(lineno) + ": expected key = value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto take = [&](const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end())
            throw MaterialError(path + ": missing key '" + key + "'");
        double x = parse_number(key, it->second);
        kv.erase(it);
        return x;
    };
    EngineeringConstants k;
    k.e_r = take("e_r");
    k.e_theta = take("e_theta");
    k.e_z = take("e_z");
    k.g_theta_z = take("g_theta_z");
    k.g_rz = take("g_rz");
    k.g_r_theta = take("g_r_theta");
    k.mu_r_theta = take("mu_r_theta");
    k.mu_theta_r = take("mu_theta_r");
    k.mu_r_z = take("mu_r_z");
    k.mu_z_r = take("mu_z_r");
    k.mu_theta_z = take("mu_theta_z");
    k.mu_z_theta = take("mu_z_theta");
    double rho = take("density");
    std::string name = "file";
    if (auto it = kv.find("name"); it != kv.end()) {
        name = it->second;
        kv.erase(it);
    }
    std::optional<Eigen::Vector3d> l;
    if (kv.count("l1") || kv.count("l2") || kv.count("l3"))
        l = Eigen::Vector3d(take("l1"), take("l2"), take("l3"));
    if (!kv.empty())
        throw MaterialError(path + ": unknown key '" + kv.begin()->first + "'");
    ElasticTensor w = tensor_from_engineering(k, rho, name);
    if (l)
        w.set_l_override(*l);
    return w;
}

LambdaPreset parse_lambda_preset(const std::string& s)
{
    if (s == "one")
        return LambdaPreset::One;
    if (s == "mean-l")
        return LambdaPreset::MeanL;
    throw MaterialError("unknown lambda preset '" + s + "' (expected one or mean-l)");
}

std::string to_string(LambdaPreset p)
{
    return p == LambdaPreset::One ? "one" : "mean-l";
}

double lambda_value(LambdaPreset p, const ElasticTensor& w)
{
    if (p == LambdaPreset::One)
        return 1.0;
    return w.l_constants().mean();
}

}  // namespace plates
