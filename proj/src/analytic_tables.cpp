#include "cribsim/analytic_tables.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "cribsim/analytic.hpp"
#include "cribsim/phase_noise.hpp"

namespace cribsim {

namespace {

std::ofstream open(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw ConfigError("cannot open output file: " + p.string());
    return out;
}

}  // namespace

std::vector<std::filesystem::path> write_analytic_tables(const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;
    char buf[160];

    {
        const auto p = out_dir / "analytic_kfactor.csv";
        auto out = open(p);
        out << "k,K\n";
        for (int i = 0; i <= 400; ++i) {
            const double k = 0.05 * i;
            std::snprintf(buf, sizeof(buf), "%.10g,%.10g\n", k, dephasing_factor(k));
            out << buf;
        }
        written.push_back(p);
    }
    {
        const auto p = out_dir / "analytic_gamma.csv";
        auto out = open(p);
        out << "optical_depth,gamma_backward,gamma_forward_exit,gamma_forward_max,"
               "eff_backward,eff_forward_max\n";
        for (int i = 0; i <= 200; ++i) {
            const double al = 0.05 * i;
            const double gb = -std::expm1(-al);
            const double gf = al * std::exp(-al / 2.0);
            const double um = std::min(2.0, al);
            const double gfm = um * std::exp(-um / 2.0);
            std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", al, gb, gf,
                          gfm, gb * gb, gfm * gfm);
            out << buf;
        }
        written.push_back(p);
    }
    {
        const auto p = out_dir / "analytic_max_efficiency.csv";
        auto out = open(p);
        out << "k3,backward,forward\n";
        std::vector<double> k3_grid;
        for (int i = 0; i <= 400; ++i) k3_grid.push_back(0.05 * i);
        for (const MaxEfficiencyRow& row : efficiency_max_curve(k3_grid)) {
            std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g\n", row.k3, row.backward,
                          row.forward);
            out << buf;
        }
        written.push_back(p);
    }
    {
        const auto p = out_dir / "analytic_fidelity.csv";
        auto out = open(p);
        out << "split_left,phi,fidelity\n";
        for (int i = 0; i <= 20; ++i) {
            const double sl = 0.05 * i;
            for (int j = 0; j <= 36; ++j) {
                const double phi = std::numbers::pi * j / 36.0;
                std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g\n", sl, phi,
                              phase_fidelity(sl, 1.0 - sl, phi));
                out << buf;
            }
        }
        written.push_back(p);
    }
    return written;
}

}  // namespace cribsim
