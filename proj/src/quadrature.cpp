#include "plates/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace plates {

namespace {

double factorial(int n)
{
    double f = 1;
    for (int i = 2; i <= n; ++i)
        f *= i;
    return f;
}

void compositions(int total, int parts, std::array<int, 4>& cur, int at, std::vector<std::array<int, 4>>& out)
{
    if (at == parts - 1) {
        cur[at] = total;
        out.push_back(cur);
        return;
    }
    for (int v = total; v >= 0; --v) {
        cur[at] = v;
        compositions(total - v, parts, cur, at + 1, out);
    }
}

SimplexRule build_gm(int s)
{
    const int n = 3;
    const int d = 2 * s + 1;
    SimplexRule r;
    for (int i = 0; i <= s; ++i) {
        double w = std::pow(2.0, -2 * s) * std::pow(d + n - 2 * i, d) / (factorial(i) * factorial(d + n - i));
        if (i % 2)
            w = -w;
        // weights above integrate over the unit simplex of volume 1/3!
        w *= factorial(n);
        std::vector<std::array<int, 4>> betas;
        std::array<int, 4> cur{};
        compositions(s - i, 4, cur, 0, betas);
        for (const auto& b : betas) {
            Eigen::Vector4d p;
            for (int k = 0; k < 4; ++k)
                p[k] = (2.0 * b[k] + 1.0) / (d + n - 2 * i);
            r.points.push_back(p);
            r.weights.push_back(w);
        }
    }
    return r;
}

}  // namespace

double simplex_monomial_integral(const std::vector<int>& a, double measure)
{
    if (a.empty())
        throw std::invalid_argument("empty exponent list");
    const int dim = static_cast<int>(a.size()) - 1;
    int sum = 0;
    double num = factorial(dim);
    for (int e : a) {
        if (e < 0)
            throw std::invalid_argument("negative exponent");
        sum += e;
        num *= factorial(e);
    }
    return num / factorial(sum + dim) * measure;
}

const SimplexRule& grundmann_moeller_tet(int s)
{
    static std::mutex m;
    static std::map<int, SimplexRule> cache;
    std::lock_guard<std::mutex> lock(m);
    auto it = cache.find(s);
    if (it == cache.end())
        it = cache.emplace(s, build_gm(s)).first;
    return it->second;
}

}  // namespace plates
