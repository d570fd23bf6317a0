#include "run_config.hpp"

#include "plates/hash.hpp"
#include "plates/sparse_io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace plates::cli {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v)
{
    std::size_t used = 0;
    double x = 0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ConfigError(key + ": not a number: '" + v + "'");
    }
    if (used != v.size() || !std::isfinite(x))
        throw ConfigError(key + ": not a number: '" + v + "'");
    return x;
}

long long parse_integer(const std::string& key, const std::string& v)
{
    std::size_t used = 0;
    long long x = 0;
    try {
        x = std::stoll(v, &used);
    } catch (const std::exception&) {
        throw ConfigError(key + ": not an integer: '" + v + "'");
    }
    if (used != v.size())
        throw ConfigError(key + ": not an integer: '" + v + "'");
    return x;
}

std::string vec_text(const Vec3& v)
{
    return format_double(v[0]) + " " + format_double(v[1]) + " " + format_double(v[2]);
}

}  // namespace

std::vector<double> parse_double_list(const std::string& s)
{
    std::vector<double> out;
    std::string item;
    std::string norm = s;
    for (char& c : norm)
        if (c == ',')
            c = ' ';
    std::istringstream is(norm);
    while (is >> item)
        out.push_back(parse_double("list", item));
    return out;
}

Vec3 parse_vec3(const std::string& s)
{
    auto v = parse_double_list(s);
    if (v.size() != 3)
        throw ConfigError("expected three numbers, got '" + s + "'");
    return Vec3(v[0], v[1], v[2]);
}

void RunConfig::set(const std::string& key, const std::string& value)
{
    const std::string v = trim(value);
    if (key == "mesh")
        mesh = v;
    else if (key == "extent")
        extent = parse_vec3(v);
    else if (key == "block")
        block = parse_vec3(v);
    else if (key == "material")
        material = v;
    else if (key == "material-file")
        material_file = v;
    else if (key == "system")
        system = v;
    else if (key == "lambda")
        lambda = v;
    else if (key == "freq")
        freq = parse_double_list(v);
    else if (key == "modes-per-freq")
        modes_per_freq = static_cast<int>(parse_integer(key, v));
    else if (key == "c-omega")
        c_omega = parse_double(key, v);
    else if (key == "wave-sign")
        wave_sign = v;
    else if (key == "source-distance")
        source_distance = parse_double(key, v);
    else if (key == "wave-speed")
        wave_speed = parse_double(key, v);
    else if (key == "amplitude")
        amplitude = parse_vec3(v);
    else if (key == "direction")
        direction = parse_vec3(v);
    else if (key == "seed")
        seed = static_cast<std::uint64_t>(parse_integer(key, v));
    else if (key == "threads")
        threads = static_cast<int>(parse_integer(key, v));
    else if (key == "out")
        out = v;
    else
        throw ConfigError("unknown configuration key '" + key + "'");
}

void RunConfig::validate() const
{
    if (system != "coarse" && system != "fine")
        throw ConfigError("system must be coarse or fine, got '" + system + "'");
    if (lambda != "one" && lambda != "mean-l")
        throw ConfigError("lambda must be one or mean-l, got '" + lambda + "'");
    if (wave_sign != "plus" && wave_sign != "minus")
        throw ConfigError("wave-sign must be plus or minus, got '" + wave_sign + "'");
    if (freq.empty())
        throw ConfigError("no frequency given");
    for (double f : freq)
        if (!(f > 0))
            throw ConfigError("frequencies must be positive");
    if (modes_per_freq < 1)
        throw ConfigError("modes-per-freq must be at least 1");
    if (!(c_omega >= 0))
        throw ConfigError("c-omega must be non-negative");
    if (!(wave_speed > 0))
        throw ConfigError("wave-speed must be positive");
    if (!(source_distance >= 0))
        throw ConfigError("source-distance must be non-negative");
    if (std::abs(direction.norm() - 1.0) > 1e-12)
        throw ConfigError("direction must be a unit vector");
    if (threads < 0)
        throw ConfigError("threads must be non-negative");
}

std::vector<std::string> RunConfig::canonical() const
{
    std::vector<std::string> out;
    auto add = [&](const std::string& k, const std::string& v) { out.push_back(k + " = " + v); };
    add("mesh", mesh);
    add("extent", vec_text(extent));
    add("block", vec_text(block));
    add("material", material);
    add("material-file", material_file);
    add("system", system);
    add("lambda", lambda);
    std::string fl;
    for (std::size_t i = 0; i < freq.size(); ++i)
        fl += (i ? "," : "") + format_double(freq[i]);
    add("freq", fl);
    add("modes-per-freq", std::to_string(modes_per_freq));
    add("c-omega", format_double(c_omega));
    add("wave-sign", wave_sign);
    add("source-distance", format_double(source_distance));
    add("wave-speed", format_double(wave_speed));
    add("amplitude", vec_text(amplitude));
    add("direction", vec_text(direction));
    add("seed", std::to_string(seed));
    return out;
}

std::uint64_t RunConfig::hash() const
{
    Fnv1a h;
    for (const auto& line : canonical()) {
        h.update(line);
        h.update("\n");
    }
    return h.digest();
}

void apply_config_file(RunConfig& cfg, const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw ConfigError("cannot read config file " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.resize(hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        try {
            cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

std::string resolve_out_dir(const RunConfig& cfg)
{
    if (!cfg.out.empty())
        return cfg.out;
    if (const char* env = std::getenv("PLATES_OUT_DIR"); env && *env)
        return env;
    return ".";
}

}  // namespace plates::cli
