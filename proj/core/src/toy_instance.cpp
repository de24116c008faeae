#include "capexp/toy_instance.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "capexp/error.hpp"

namespace capexp {

ToyInstance make_toy_instance(std::uint64_t seed, int T, TechSet techs)
{
    if (T < 24)
        throw Error(ErrorKind::InvalidParams, fmt::format("toy instance needs T >= 24, got {}", T));
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    ToyInstance toy;
    TimeSeriesBundle& b = toy.bundle;
    b.horizon_hours = T;
    b.has_csp = techs.has(Tech::Csp);

    const double start_day = 10.0 + 20.0 * uni(rng);  // mid-winter start
    double wind = 0.35;
    double clear = 0.8;
    for (int t = 0; t < T; ++t) {
        const double hour = t % 24;
        const double day = start_day + t / 24.0;
        if (t % 24 == 0)
            clear = std::clamp(0.55 + 0.45 * uni(rng), 0.0, 1.0);
        const double season = std::cos(two_pi * (day - 15.0) / 365.0);  // +1 in January

        const double de = 800.0 * (1.0 + 0.12 * std::sin(two_pi * (hour - 9.0) / 24.0) - 0.06 * season) *
                          (1.0 + 0.02 * gauss(rng));
        const double dh = 160.0 * (0.6 + 0.4 * season) * (1.0 + 0.1 * std::cos(two_pi * (hour - 3.0) / 24.0)) *
                          (1.0 + 0.02 * gauss(rng));
        // mean-reverting wind, never fully calm
        wind += 0.25 * (0.35 + 0.05 * season - wind) + 0.06 * gauss(rng);
        wind = std::clamp(wind, 0.12, 0.85);
        const double sun = hour >= 6.0 && hour <= 18.0 ? std::sin(std::numbers::pi * (hour - 6.0) / 12.0) : 0.0;

        b.demand_electric.push_back(std::max(0.0, de));
        b.demand_heat.push_back(std::max(0.0, dh));
        b.cf_wind.push_back(wind);
        b.cf_pv.push_back(std::clamp(0.85 * sun * clear, 0.0, 1.0));
        if (b.has_csp) {
            b.dni.push_back(0.9 * sun * clear);
            b.cf_csp.push_back(0.95 + 0.05 * uni(rng));  // plant availability
        } else {
            b.dni.push_back(0.0);
            b.cf_csp.push_back(0.0);
        }
    }

    ParameterLibrary lib = default_parameter_library();
    CoalGroupParams coal = lib.coal.front();
    coal.existing_capacity = 600.0;
    ChpGroupParams chp = lib.chp.front();
    chp.existing_capacity = 300.0;
    CspGroupParams csp = lib.csp.front();
    csp.existing_capacity = 0.0;
    csp.max_build = 1000.0;  // site limit; also bounds the strict-mode switch
    lib.coal = {coal};
    lib.chp = {chp};
    lib.csp = {csp};
    lib.wind.existing_capacity = 300.0;
    lib.pv.existing_capacity = 150.0;
    lib.eb.existing_capacity = 0.0;
    toy.library = lib;
    return toy;
}

void write_toy_instance(const ToyInstance& toy, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    write_bundle(toy.bundle, dir / "bundle.csv");
    std::ofstream out(dir / "params.json", std::ios::binary);
    if (!out)
        throw Error(ErrorKind::IoError, fmt::format("cannot write {}", (dir / "params.json").string()));
    out << library_to_json(toy.library) << '\n';
    if (!out)
        throw Error(ErrorKind::IoError, fmt::format("write failed: {}", (dir / "params.json").string()));
}

}  // namespace capexp
