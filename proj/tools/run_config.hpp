#pragma once

#include "plates/mesh.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace plates::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Everything a run depends on.  Keys mirror the long flag names.
struct RunConfig {
    std::string mesh;  // parent mesh file; the slab generator when empty
    Vec3 extent = Vec3(0.10, 0.01, 0.20);
    Vec3 block = Vec3(0.01, 0.005, 0.01);
    std::string material = "spruce-engelmann";
    std::string material_file;
    std::string system = "coarse";
    std::string lambda = "one";
    std::vector<double> freq = {80, 147, 222, 304, 349};
    int modes_per_freq = 1;
    double c_omega = 0.05;
    std::string wave_sign = "minus";
    double source_distance = 0.62;
    double wave_speed = 343;
    Vec3 amplitude = Vec3(0, 1, 0);
    Vec3 direction = Vec3(0, 1, 0);
    std::uint64_t seed = 12345;
    int threads = 0;
    std::string out;

    void set(const std::string& key, const std::string& value);
    void validate() const;
    // key = value lines of every setting that can change results; threads
    // and out are left out
    std::vector<std::string> canonical() const;
    std::uint64_t hash() const;
};

// flat key = value text, '#' starts a comment
void apply_config_file(RunConfig& cfg, const std::string& path);

// --out, then $PLATES_OUT_DIR, then the working directory
std::string resolve_out_dir(const RunConfig& cfg);

std::vector<double> parse_double_list(const std::string& s);
Vec3 parse_vec3(const std::string& s);

}  // namespace plates::cli
