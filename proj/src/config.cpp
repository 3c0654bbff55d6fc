#include "cribsim/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace cribsim {

bool operator==(const PulseSpec& a, const PulseSpec& b) {
    return a.peak_rabi == b.peak_rabi && a.center_time == b.center_time &&
           a.split_left == b.split_left && a.split_right == b.split_right &&
           a.relative_phase == b.relative_phase;
}
bool operator==(const MediumParams& a, const MediumParams& b) {
    return a.optical_depth == b.optical_depth && a.n_z == b.n_z;
}
bool operator==(const BroadeningParams& a, const BroadeningParams& b) {
    return a.half_width == b.half_width && a.n_classes == b.n_classes;
}
bool operator==(const ProtocolParams& a, const ProtocolParams& b) {
    return a.direction == b.direction && a.storage_time == b.storage_time &&
           a.phase_matching == b.phase_matching;
}
bool operator==(const LevelPhases& a, const LevelPhases& b) {
    return a.phi1 == b.phi1 && a.phi2 == b.phi2 && a.phi3 == b.phi3;
}
bool operator==(const NoiseParams& a, const NoiseParams& b) {
    auto same = [](double x, double y) { return x == y || (std::isinf(x) && std::isinf(y)); };
    return same(a.k1, b.k1) && same(a.k2, b.k2) && same(a.k3, b.k3) && a.mode == b.mode &&
           a.n_samples == b.n_samples && a.seed == b.seed;
}
bool operator==(const NumericsParams& a, const NumericsParams& b) {
    return a.dt == b.dt && a.window_start == b.window_start && a.window_end == b.window_end &&
           a.bloch == b.bloch && a.weak_threshold == b.weak_threshold &&
           a.population_threshold == b.population_threshold;
}
bool operator==(const OutputParams& a, const OutputParams& b) {
    return a.prefix == b.prefix && a.write_grids == b.write_grids;
}
bool operator==(const RunSpec& a, const RunSpec& b) {
    return a.pulse == b.pulse && a.medium == b.medium && a.broadening == b.broadening &&
           a.protocol == b.protocol && a.phases == b.phases && a.noise == b.noise &&
           a.numerics == b.numerics && a.output == b.output;
}

namespace {

bool is_multiple(double span, double dt) {
    const double k = span / dt;
    return std::abs(k - std::lround(k)) < 1e-9 * std::max(1.0, std::abs(k));
}

double parse_double(const std::string& key, const std::string& v) {
    if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid numeric value for " + key + ": '" + v + "'");
    }
}

long parse_long(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer value for " + key + ": '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("invalid boolean value for " + key + ": '" + v + "'");
}

std::string fmt(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

void validate_spec(RunSpec& spec) {
    spec.warnings.clear();
    const auto& p = spec.pulse;
    if (p.peak_rabi <= 0.0) throw ConfigError("pulse peak_rabi must be positive");
    if (p.split_left < 0.0 || p.split_left > 1.0 || p.split_right < 0.0 || p.split_right > 1.0)
        throw ConfigError("pulse intensity splits must lie in [0, 1]");
    if (std::abs(p.split_left + p.split_right - 1.0) > 1e-9)
        throw ConfigError("pulse intensity splits must satisfy split_left + split_right = 1");

    if (spec.medium.optical_depth < 0.0) throw ConfigError("optical_depth must be non-negative");
    if (spec.medium.n_z < 2) throw ConfigError("n_z must be at least 2");

    if (spec.broadening.half_width <= 0.0) throw ConfigError("half_width must be positive");
    if (spec.broadening.n_classes < 3) throw ConfigError("n_classes must be at least 3");
    if (spec.broadening.n_classes % 2 == 0)
        throw ConfigError("n_classes must be odd (classes must be symmetric about delta = 0)");

    if (spec.protocol.storage_time < 0.0) throw ConfigError("storage_time must be non-negative");
    const bool backward = spec.protocol.direction == Direction::Backward;
    if (spec.protocol.phase_matching == PhaseMatchingOption::On && !backward)
        throw ConfigError("phase_matching = on requires backward retrieval");
    if (spec.protocol.phase_matching == PhaseMatchingOption::Off && backward)
        throw ConfigError("backward retrieval requires phase_matching (use auto or on)");

    const auto& nz = spec.numerics;
    if (nz.dt <= 0.0) throw ConfigError("dt must be positive");
    if (nz.window_start >= 0.0) throw ConfigError("window_start must be negative");
    if (nz.window_end <= 0.0) throw ConfigError("window_end must be positive");
    if (p.center_time <= nz.window_start || p.center_time >= 0.0)
        throw ConfigError("pulse center_time must lie inside the absorption window");
    if (!is_multiple(-nz.window_start, nz.dt))
        throw ConfigError("absorption window length must be a multiple of dt");
    if (!is_multiple(nz.window_end + spec.protocol.storage_time, nz.dt))
        throw ConfigError("retrieval window length (window_end + storage_time) must be a "
                          "multiple of dt");
    if (nz.dt * spec.broadening.half_width > 0.5 + 1e-12)
        throw ConfigError("dt violates the integrator stability bound dt * half_width <= 0.5");
    if (nz.weak_threshold <= 0.0) throw ConfigError("weak_threshold must be positive");
    if (nz.population_threshold <= 0.0)
        throw ConfigError("population_threshold must be positive");

    const auto& ns = spec.noise;
    for (double k : {ns.k1, ns.k2, ns.k3})
        if (k < 0.0) throw ConfigError("noise inverse widths must be non-negative");
    if (ns.n_samples < 1) throw ConfigError("noise n_samples must be at least 1");

    // revival check happens here so the error carries the class-count hint
    build_detuning_grid(spec.profile(), spec.broadening.n_classes, spec.total_window());

    if (spec.broadening.half_width < 10.0 * spec.pulse.spectral_half_width())
        spec.warnings.push_back(
            "broadening half_width is below 10x the pulse spectral half-width; absorption of "
            "the spectral wings will be incomplete");
    if (spec.pulse.peak_rabi > nz.weak_threshold)
        spec.warnings.push_back("pulse peak_rabi exceeds the weak-field threshold");
    if (p.center_time - nz.window_start < 3.0 || -p.center_time < 3.0)
        spec.warnings.push_back("pulse sits within 3 durations of the window edge; its tails "
                                "will be clipped");
}

namespace {

using Section = std::map<std::string, std::string>;

struct ParsedFile {
    std::map<std::string, Section> sections;
};

ParsedFile tokenize(const std::string& text) {
    ParsedFile out;
    std::istringstream in(text);
    std::string line;
    std::string current;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            current = trim(line.substr(1, line.size() - 2));
            out.sections[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        if (current.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (!out.sections[current].emplace(key, val).second)
            throw ConfigError("duplicate key '" + key + "' in section [" + current + "]");
    }
    return out;
}

class SectionReader {
public:
    SectionReader(const ParsedFile& f, const std::string& name) : name_(name) {
        auto it = f.sections.find(name);
        if (it != f.sections.end()) entries_ = &it->second;
    }

    template <typename F>
    void take(const std::string& key, F&& apply) {
        known_.insert(key);
        if (!entries_) return;
        auto it = entries_->find(key);
        if (it != entries_->end()) apply(it->second);
    }

    void finish() const {
        if (!entries_) return;
        for (const auto& [key, value] : *entries_)
            if (!known_.count(key))
                throw ConfigError("unknown key '" + key + "' in section [" + name_ + "]");
    }

private:
    std::string name_;
    const Section* entries_ = nullptr;
    std::set<std::string> known_;
};

}  // namespace

RunSpec parse_config_text(const std::string& text) {
    const ParsedFile file = tokenize(text);
    static const std::set<std::string> known_sections = {
        "pulse",  "medium",        "broadening", "protocol",
        "noise",  "deterministic_phases", "numerics",   "output"};
    for (const auto& [name, _] : file.sections)
        if (!known_sections.count(name))
            throw ConfigError("unknown section [" + name + "]");

    RunSpec spec;

    SectionReader pulse(file, "pulse");
    pulse.take("peak_rabi", [&](auto& v) { spec.pulse.peak_rabi = parse_double("peak_rabi", v); });
    pulse.take("center_time",
               [&](auto& v) { spec.pulse.center_time = parse_double("center_time", v); });
    pulse.take("split_left",
               [&](auto& v) { spec.pulse.split_left = parse_double("split_left", v); });
    pulse.take("split_right",
               [&](auto& v) { spec.pulse.split_right = parse_double("split_right", v); });
    pulse.take("relative_phase",
               [&](auto& v) { spec.pulse.relative_phase = parse_double("relative_phase", v); });
    pulse.finish();

    SectionReader medium(file, "medium");
    medium.take("optical_depth",
                [&](auto& v) { spec.medium.optical_depth = parse_double("optical_depth", v); });
    medium.take("n_z", [&](auto& v) { spec.medium.n_z = static_cast<int>(parse_long("n_z", v)); });
    medium.finish();

    SectionReader broadening(file, "broadening");
    broadening.take("half_width",
                    [&](auto& v) { spec.broadening.half_width = parse_double("half_width", v); });
    broadening.take("n_classes", [&](auto& v) {
        spec.broadening.n_classes = static_cast<int>(parse_long("n_classes", v));
    });
    broadening.finish();

    SectionReader protocol(file, "protocol");
    protocol.take("direction", [&](auto& v) {
        if (v == "forward")
            spec.protocol.direction = Direction::Forward;
        else if (v == "backward")
            spec.protocol.direction = Direction::Backward;
        else
            throw ConfigError("direction must be forward or backward, got '" + v + "'");
    });
    protocol.take("storage_time",
                  [&](auto& v) { spec.protocol.storage_time = parse_double("storage_time", v); });
    protocol.take("phase_matching", [&](auto& v) {
        if (v == "auto")
            spec.protocol.phase_matching = PhaseMatchingOption::Auto;
        else if (v == "on")
            spec.protocol.phase_matching = PhaseMatchingOption::On;
        else if (v == "off")
            spec.protocol.phase_matching = PhaseMatchingOption::Off;
        else
            throw ConfigError("phase_matching must be auto, on or off, got '" + v + "'");
    });
    protocol.finish();

    SectionReader phases(file, "deterministic_phases");
    phases.take("phi1", [&](auto& v) { spec.phases.phi1 = parse_double("phi1", v); });
    phases.take("phi2", [&](auto& v) { spec.phases.phi2 = parse_double("phi2", v); });
    phases.take("phi3", [&](auto& v) { spec.phases.phi3 = parse_double("phi3", v); });
    phases.finish();

    SectionReader noise(file, "noise");
    noise.take("mode", [&](auto& v) {
        if (v == "analytic")
            spec.noise.mode = NoiseMode::Analytic;
        else if (v == "monte_carlo")
            spec.noise.mode = NoiseMode::MonteCarlo;
        else
            throw ConfigError("noise mode must be analytic or monte_carlo, got '" + v + "'");
    });
    noise.take("k1", [&](auto& v) { spec.noise.k1 = parse_double("k1", v); });
    noise.take("k2", [&](auto& v) { spec.noise.k2 = parse_double("k2", v); });
    noise.take("k3", [&](auto& v) { spec.noise.k3 = parse_double("k3", v); });
    noise.take("n_samples", [&](auto& v) { spec.noise.n_samples = parse_long("n_samples", v); });
    noise.take("seed", [&](auto& v) {
        spec.noise.seed = static_cast<std::uint64_t>(parse_long("seed", v));
    });
    noise.finish();

    SectionReader numerics(file, "numerics");
    numerics.take("dt", [&](auto& v) { spec.numerics.dt = parse_double("dt", v); });
    numerics.take("window_start",
                  [&](auto& v) { spec.numerics.window_start = parse_double("window_start", v); });
    numerics.take("window_end",
                  [&](auto& v) { spec.numerics.window_end = parse_double("window_end", v); });
    numerics.take("bloch", [&](auto& v) {
        if (v == "weak")
            spec.numerics.bloch = BlochMode::Weak;
        else if (v == "full")
            spec.numerics.bloch = BlochMode::Full;
        else
            throw ConfigError("bloch must be weak or full, got '" + v + "'");
    });
    numerics.take("weak_threshold",
                  [&](auto& v) { spec.numerics.weak_threshold = parse_double("weak_threshold", v); });
    numerics.take("population_threshold", [&](auto& v) {
        spec.numerics.population_threshold = parse_double("population_threshold", v);
    });
    numerics.finish();

    SectionReader output(file, "output");
    output.take("prefix", [&](auto& v) { spec.output.prefix = v; });
    output.take("write_grids",
                [&](auto& v) { spec.output.write_grids = parse_bool("write_grids", v); });
    output.finish();

    validate_spec(spec);
    return spec;
}

RunSpec parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string serialize_config(const RunSpec& spec) {
    std::ostringstream out;
    out << "[pulse]\n";
    out << "peak_rabi = " << fmt(spec.pulse.peak_rabi) << "\n";
    out << "center_time = " << fmt(spec.pulse.center_time) << "\n";
    out << "split_left = " << fmt(spec.pulse.split_left) << "\n";
    out << "split_right = " << fmt(spec.pulse.split_right) << "\n";
    out << "relative_phase = " << fmt(spec.pulse.relative_phase) << "\n\n";

    out << "[medium]\n";
    out << "optical_depth = " << fmt(spec.medium.optical_depth) << "\n";
    out << "n_z = " << spec.medium.n_z << "\n\n";

    out << "[broadening]\n";
    out << "half_width = " << fmt(spec.broadening.half_width) << "\n";
    out << "n_classes = " << spec.broadening.n_classes << "\n\n";

    out << "[protocol]\n";
    out << "direction = " << to_string(spec.protocol.direction) << "\n";
    out << "storage_time = " << fmt(spec.protocol.storage_time) << "\n";
    out << "phase_matching = "
        << (spec.protocol.phase_matching == PhaseMatchingOption::Auto
                ? "auto"
                : spec.protocol.phase_matching == PhaseMatchingOption::On ? "on" : "off")
        << "\n\n";

    out << "[deterministic_phases]\n";
    out << "phi1 = " << fmt(spec.phases.phi1) << "\n";
    out << "phi2 = " << fmt(spec.phases.phi2) << "\n";
    out << "phi3 = " << fmt(spec.phases.phi3) << "\n\n";

    out << "[noise]\n";
    out << "mode = " << (spec.noise.mode == NoiseMode::Analytic ? "analytic" : "monte_carlo")
        << "\n";
    out << "k1 = " << fmt(spec.noise.k1) << "\n";
    out << "k2 = " << fmt(spec.noise.k2) << "\n";
    out << "k3 = " << fmt(spec.noise.k3) << "\n";
    out << "n_samples = " << spec.noise.n_samples << "\n";
    out << "seed = " << spec.noise.seed << "\n\n";

    out << "[numerics]\n";
    out << "dt = " << fmt(spec.numerics.dt) << "\n";
    out << "window_start = " << fmt(spec.numerics.window_start) << "\n";
    out << "window_end = " << fmt(spec.numerics.window_end) << "\n";
    out << "bloch = " << (spec.numerics.bloch == BlochMode::Weak ? "weak" : "full") << "\n";
    out << "weak_threshold = " << fmt(spec.numerics.weak_threshold) << "\n";
    out << "population_threshold = " << fmt(spec.numerics.population_threshold) << "\n\n";

    out << "[output]\n";
    out << "prefix = " << spec.output.prefix << "\n";
    out << "write_grids = " << (spec.output.write_grids ? "true" : "false") << "\n";
    return out.str();
}

}  // namespace cribsim
