#include "softboltz/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include "softboltz/error.hpp"

namespace softboltz {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& s) {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw InputError("expected a number, got '" + s + "'");
    return x;
}

long long to_integer(const std::string& s) {
    long long x = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw InputError("expected an integer, got '" + s + "'");
    return x;
}

int to_int(const std::string& s) {
    const long long x = to_integer(s);
    if (x < -1'000'000'000LL || x > 1'000'000'000LL) throw InputError("integer out of range: " + s);
    return static_cast<int>(x);
}

bool to_bool(const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw InputError("expected true or false, got '" + s + "'");
}

std::vector<double> to_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
    if (out.empty()) throw InputError("expected a comma-separated list");
    return out;
}

Vec3 to_vec3(const std::string& s) {
    const auto v = to_list(s);
    if (v.size() != 3) throw InputError("expected three components");
    return {v[0], v[1], v[2]};
}

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

std::string fmt(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s;
}

struct Entry {
    std::function<void(const std::string&)> set;
    std::function<std::string()> get;
};

// Key table over one config; the order is the canonical order of to_text().
std::vector<std::pair<std::string, Entry>> table(RunConfig& c) {
    const auto real = [](double& x) {
        return Entry{[&x](const std::string& s) { x = to_double(s); }, [&x] { return fmt(x); }};
    };
    const auto integer = [](int& x) {
        return Entry{[&x](const std::string& s) { x = to_int(s); }, [&x] { return std::to_string(x); }};
    };
    return {
        {"kernel.gamma", real(c.kernel.gamma)},
        {"kernel.b0", real(c.kernel.b0)},
        {"kernel.m", real(c.kernel.m_cutoff)},
        {"grid.extent", real(c.extent)},
        {"grid.n", integer(c.n)},
        {"grid.sphere_order", integer(c.sphere_order)},
        {"domain.mode", {[&c](const std::string& s) { c.domain_mode = parse_domain_mode(s); },
                         [&c] { return to_string(c.domain_mode); }}},
        {"domain.cells", integer(c.cells)},
        {"domain.period", real(c.period)},
        {"solver.horizon", real(c.solver.horizon)},
        {"solver.substeps", integer(c.solver.substeps)},
        {"solver.picard_tol", real(c.solver.picard_tol)},
        {"solver.picard_max_iters", integer(c.solver.picard_max_iters)},
        {"solver.c1", real(c.solver.c1)},
        {"solver.positivity_tol", real(c.solver.positivity_tol)},
        {"solver.collisions", {[&c](const std::string& s) { c.solver.collisions = to_bool(s); },
                               [&c] { return std::string(c.solver.collisions ? "true" : "false"); }}},
        {"solver.windows", integer(c.windows)},
        {"weight.mode", {[&c](const std::string& s) { c.weight.mode = parse_weight_mode(s); },
                         [&c] { return to_string(c.weight.mode); }}},
        {"weight.beta", real(c.weight.beta)},
        {"weight.exploratory_beta", real(c.exploratory_beta)},
        {"weight.p", real(c.weight.p)},
        {"weight.q", real(c.weight.q)},
        {"initial.family", {[&c](const std::string& s) { c.initial.family = parse_initial_family(s); },
                            [&c] { return to_string(c.initial.family); }}},
        {"initial.amplitude", real(c.initial.amplitude)},
        {"initial.norm", {[&c](const std::string& s) {
                              if (s == "none") c.initial.target_norm.reset();
                              else c.initial.target_norm = to_double(s);
                          },
                          [&c] { return c.initial.target_norm ? fmt(*c.initial.target_norm) : std::string("none"); }}},
        {"initial.center", {[&c](const std::string& s) { c.initial.center = to_vec3(s); },
                            [&c] {
                                const Vec3& v = c.initial.center;
                                return fmt(std::vector<double>{v.x, v.y, v.z});
                            }}},
        {"initial.width", real(c.initial.width)},
        {"initial.seed", {[&c](const std::string& s) {
                              if (s == "none") {
                                  c.initial.seed.reset();
                                  return;
                              }
                              const long long x = to_integer(s);
                              if (x < 0) throw InputError("seed must be non-negative");
                              c.initial.seed = static_cast<std::uint64_t>(x);
                          },
                          [&c] { return c.initial.seed ? std::to_string(*c.initial.seed) : std::string("none"); }}},
        {"output.dir", {[&c](const std::string& s) { c.output_dir = s; }, [&c] { return c.output_dir.string(); }}},
        {"verify.coarse_n", integer(c.verify.coarse_n)},
        {"verify.solver_n", integer(c.verify.solver_n)},
        {"verify.fields", integer(c.verify.fields)},
        {"verify.field_amplitude", real(c.verify.field_amplitude)},
        {"verify.lemma41_fields", integer(c.verify.lemma41_fields)},
        {"verify.m_list", {[&c](const std::string& s) { c.verify.m_list = to_list(s); },
                           [&c] { return fmt(c.verify.m_list); }}},
        {"verify.targets", {[&c](const std::string& s) { c.verify.targets = to_list(s); },
                            [&c] { return fmt(c.verify.targets); }}},
        {"verify.march_target", real(c.verify.march_target)},
        {"verify.determinism_n", integer(c.verify.determinism_n)},
    };
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

} // namespace

WeightSpec RunConfig::weight_for(WeightMode mode) const {
    WeightSpec s = weight;
    s.mode = mode;
    if (mode == WeightMode::exploratory) s.beta = exploratory_beta;
    return s;
}

GridPtr RunConfig::make_grid(int nodes_per_axis) const {
    return std::make_shared<const VelocityGrid>(extent, nodes_per_axis);
}

SpatialDomain RunConfig::make_domain() const {
    switch (domain_mode) {
        case DomainMode::homogeneous: return SpatialDomain::homogeneous();
        case DomainMode::slab1d: return SpatialDomain::slab1d(period, cells);
        case DomainMode::torus3d: return SpatialDomain::torus3d(period, cells);
    }
    return SpatialDomain::homogeneous();
}

void RunConfig::validate() const {
    try {
        kernel.validate();
        solver.validate();
        weight_for(weight.mode).validate(kernel.gamma);
    } catch (const InputError& e) {
        throw ConfigError(e.what());
    }
    require(extent > 0.0 && std::isfinite(extent), "grid.extent must be positive");
    const auto odd = [](int k) { return k >= 3 && k % 2 == 1; };
    require(odd(n), "grid.n must be odd and at least 3");
    require(sphere_order >= 1, "grid.sphere_order must be positive");
    require(cells >= 1, "domain.cells must be positive");
    require(period > 0.0 && std::isfinite(period), "domain.period must be positive");
    require(windows >= 1, "solver.windows must be positive");
    require(exploratory_beta >= 0.0, "weight.exploratory_beta must be non-negative");
    require(!(initial.family == InitialFamily::random_smooth && !initial.seed),
            "initial.seed is required for the random-smooth family");
    require(initial.width > 0.0, "initial.width must be positive");
    require(initial.amplitude >= 0.0, "initial.amplitude must be non-negative");
    require(odd(verify.coarse_n) && verify.coarse_n < n, "verify.coarse_n must be odd and below grid.n");
    require(odd(verify.solver_n), "verify.solver_n must be odd and at least 3");
    require(odd(verify.determinism_n), "verify.determinism_n must be odd and at least 3");
    require(verify.fields >= 1 && verify.lemma41_fields >= 1, "verify field counts must be positive");
    require(verify.field_amplitude > 0.0 && verify.field_amplitude < 1.0, "verify.field_amplitude must lie in (0, 1)");
    require(verify.m_list.size() >= 3, "verify.m_list needs at least three values");
    for (std::size_t i = 0; i < verify.m_list.size(); ++i) {
        require(verify.m_list[i] > 0.0 && verify.m_list[i] <= 1.0, "verify.m_list values must lie in (0, 1]");
        require(i == 0 || verify.m_list[i] < verify.m_list[i - 1], "verify.m_list must be strictly decreasing");
    }
    require(!verify.targets.empty(), "verify.targets must not be empty");
    require(verify.march_target > 0.0, "verify.march_target must be positive");
}

std::string RunConfig::to_text() const {
    RunConfig copy = *this;
    std::string out;
    for (const auto& [key, entry] : table(copy)) out += key + " = " + entry.get() + '\n';
    return out;
}

RunConfig parse_config(std::istream& in) {
    RunConfig c;
    auto keys = table(c);
    std::map<std::string, Entry*> index;
    for (auto& [k, e] : keys) index[k] = &e;
    std::map<std::string, int> seen;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", number);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = index.find(key);
        if (it == index.end()) throw ConfigError("unknown key '" + key + "'", number);
        if (const auto prev = seen.find(key); prev != seen.end())
            throw ConfigError("key '" + key + "' already set on line " + std::to_string(prev->second), number);
        seen[key] = number;
        if (value.empty()) throw ConfigError("missing value for '" + key + "'", number);
        try {
            it->second->set(value);
        } catch (const InputError& e) {
            throw ConfigError(key + ": " + e.what(), number);
        }
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_config(in);
}

} // namespace softboltz
