#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cribsim/analytic.hpp"
#include "cribsim/analytic_tables.hpp"
#include "cribsim/output.hpp"
#include "cribsim/phase_noise.hpp"
#include "cribsim/runner.hpp"
#include "cribsim/sweep.hpp"

using namespace cribsim;

namespace {

RunSpec small_spec() {
    RunSpec s;
    s.medium.optical_depth = 3.0;
    s.medium.n_z = 40;
    s.broadening.half_width = 8.0;
    s.broadening.n_classes = 101;
    s.numerics.dt = 0.05;
    s.protocol.storage_time = 2.0;
    validate_spec(s);
    return s;
}

int count_lines(const std::filesystem::path& p) {
    std::ifstream in(p);
    int n = 0;
    std::string line;
    while (std::getline(in, line)) ++n;
    return n;
}

}  // namespace

TEST_SUITE("protocol runs") {

TEST_CASE("identical spec and seed give byte-identical summaries") {
    RunSpec s = small_spec();
    s.noise.k3 = 4.0;
    s.noise.mode = NoiseMode::MonteCarlo;
    s.noise.n_samples = 200;
    validate_spec(s);
    const std::string a = summary_json(run_protocol(s));
    const std::string b = summary_json(run_protocol(s));
    CHECK(a == b);
}

#ifdef _OPENMP
TEST_CASE("results do not depend on the thread count") {
    RunSpec s = small_spec();
    s.noise.k3 = 4.0;
    s.noise.mode = NoiseMode::MonteCarlo;
    s.noise.n_samples = 200;
    validate_spec(s);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const std::string one = summary_json(run_protocol(s));
    omp_set_num_threads(2);
    const std::string two = summary_json(run_protocol(s));
    omp_set_num_threads(saved);
    CHECK(one == two);
}
#endif

TEST_CASE("storage time does not change the noise-free efficiency") {
    RunSpec a = small_spec();
    a.protocol.storage_time = 0.0;
    validate_spec(a);
    RunSpec b = small_spec();
    b.protocol.storage_time = 4.0;
    validate_spec(b);
    const RunResult ra = run_protocol(a);
    const RunResult rb = run_protocol(b);
    CHECK(std::abs(ra.eff13.exit_face - rb.eff13.exit_face) < 1e-3);
}

TEST_CASE("deterministic phase shows up in the extracted qubit") {
    RunSpec s = small_spec();
    s.phases = {0.8, 0.0, 0.0};
    validate_spec(s);
    const RunResult r = run_protocol(s);
    CHECK(std::abs(r.qubit.relative_phase - 0.8) < 1e-3);
    CHECK(std::abs(r.qubit.fidelity.conditional - phase_fidelity(0.6, 0.4, 0.8)) < 1e-3);
    // phases leave the per-channel efficiencies alone
    RunSpec clean = small_spec();
    const RunResult rc = run_protocol(clean);
    CHECK(std::abs(r.eff13.exit_face - rc.eff13.exit_face) < 1e-9);
}

TEST_CASE("ground-level phase changes nothing") {
    RunSpec s = small_spec();
    s.phases = {0.0, 0.0, 1.9};
    validate_spec(s);
    const RunResult r = run_protocol(s);
    const RunResult rc = run_protocol(small_spec());
    CHECK(std::abs(r.eff13.exit_face - rc.eff13.exit_face) < 1e-8);
    CHECK(std::abs(r.qubit.fidelity.conditional - rc.qubit.fidelity.conditional) < 1e-8);
    CHECK(std::abs(r.qubit.relative_phase - rc.qubit.relative_phase) < 1e-8);
}

TEST_CASE("analytic and Monte Carlo noise agree at the efficiency level") {
    RunSpec a = small_spec();
    a.noise.k3 = 5.0;
    validate_spec(a);
    RunSpec m = a;
    m.noise.mode = NoiseMode::MonteCarlo;
    m.noise.n_samples = 10000;
    validate_spec(m);
    const RunResult ra = run_protocol(a);
    const RunResult rm = run_protocol(m);
    CHECK(std::abs(rm.eff13.exit_face - ra.eff13.exit_face) / ra.eff13.exit_face < 0.01);
}

TEST_CASE("full mode reproduces the weak-mode retrieval") {
    RunSpec w = small_spec();
    RunSpec f = small_spec();
    f.numerics.bloch = BlochMode::Full;
    validate_spec(f);
    const RunResult rw = run_protocol(w);
    const RunResult rf = run_protocol(f);
    const auto a = rw.retrieval.series13(rw.retrieval.exit_node());
    const auto b = rf.retrieval.series13(rf.retrieval.exit_node());
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        num += std::norm(a[j] - b[j]);
        den += std::norm(a[j]);
    }
    CHECK(std::sqrt(num / den) <= 1e-4);
    CHECK(rf.diagnostics.weak_field_pass);
    CHECK(rf.diagnostics.max_p11_class > 0.0);
}

TEST_CASE("a strong pulse fails the weak-field verdict") {
    RunSpec s = small_spec();
    s.pulse.peak_rabi = 1.0;
    s.numerics.bloch = BlochMode::Full;
    validate_spec(s);
    CHECK(!s.warnings.empty());
    const RunResult r = run_protocol(s);
    CHECK_FALSE(r.diagnostics.weak_field_pass);
    CHECK(r.diagnostics.max_p11_class > 1e-3);
}

}  // TEST_SUITE

TEST_SUITE("outputs and tables") {

TEST_CASE("run outputs: summary schema and rectangular grids") {
    RunSpec s = small_spec();
    s.output.prefix = "t";
    const RunResult r = run_protocol(s);
    const auto dir = std::filesystem::temp_directory_path() / "cribsim_test_out";
    std::filesystem::remove_all(dir);
    const auto written = write_run_outputs(r, dir);
    REQUIRE(written.size() == 3);

    std::ifstream in(written[0]);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string json = buf.str();
    for (const char* key :
         {"schema_version", "efficiency", "qubit", "diagnostics", "analytic", "seed"})
        CHECK(json.find(key) != std::string::npos);

    // header plus n_z * n_t rows per stage grid
    CHECK(count_lines(written[1]) == 1 + s.medium.n_z * r.absorption.n_t());
    CHECK(count_lines(written[2]) == 1 + s.medium.n_z * r.retrieval.n_t());
    std::ifstream csv(written[1]);
    std::string header;
    std::getline(csv, header);
    CHECK(header == "t,z,I13,I23");
    std::filesystem::remove_all(dir);
}

TEST_CASE("sweep covers the grid and matches the analytic columns") {
    RunSpec s = small_spec();
    const auto rows = run_sweep(s, {1.0, 2.0}, {0.0, 5.0});
    REQUIRE(rows.size() == 4);
    for (const SweepRow& row : rows) {
        const double predicted = noisy_efficiency(
            row.optical_depth, std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity(), row.k3, Direction::Backward, 1, false);
        CHECK(row.analytic_exit == doctest::Approx(predicted).epsilon(1e-12));
        if (row.k3 == 0.0) CHECK(row.eff13_exit < 1e-6);  // fully scrambled phases
        else CHECK(row.eff13_exit == doctest::Approx(predicted).epsilon(0.03));
    }
    CHECK_THROWS_AS(run_sweep(s, {}, {1.0}), ConfigError);
}

TEST_CASE("analytic tables contain the reference points") {
    const auto dir = std::filesystem::temp_directory_path() / "cribsim_tables";
    std::filesystem::remove_all(dir);
    const auto written = write_analytic_tables(dir);
    REQUIRE(written.size() == 4);
    std::ifstream in(dir / "analytic_max_efficiency.csv");
    std::string line;
    std::getline(in, line);
    bool found = false;
    while (std::getline(in, line)) {
        if (line.rfind("5,", 0) == 0) {
            std::stringstream ss(line);
            std::string tok;
            std::getline(ss, tok, ',');
            std::getline(ss, tok, ',');
            CHECK(std::stod(tok) == doctest::Approx(0.798133).epsilon(1e-4));
            std::getline(ss, tok, ',');
            CHECK(std::stod(tok) == doctest::Approx(0.432062).epsilon(1e-4));
            found = true;
        }
    }
    CHECK(found);
    std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
