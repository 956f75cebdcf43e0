#include "softboltz/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "softboltz/error.hpp"

namespace softboltz {

std::string slice_csv(const PerturbationField& f) {
    const VelocityGrid& g = f.grid();
    const auto mu = g.maxwellian();
    const auto sq = g.sqrt_maxwellian();
    std::string out = "cell,v_index,v1,v2,v3,F,f\n";
    out.reserve(out.size() + f.cells() * g.size() * 96);
    char buf[192];
    for (std::size_t c = 0; c < f.cells(); ++c)
        for (std::size_t v = 0; v < g.size(); ++v) {
            const Vec3& x = g.node(v);
            const double fv = f.at(c, v);
            std::snprintf(buf, sizeof buf, "%zu,%zu,%.10g,%.10g,%.10g,%.17g,%.17g\n", c, v, x.x, x.y, x.z,
                          mu[v] + sq[v] * fv, fv);
            out += buf;
        }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw Error("cannot write " + path.string());
}

std::string windows_csv(const MarchResult& march) {
    std::ostringstream os;
    os.precision(12);
    os << "window,t0,t1,T1,iterations,converged,min_F_ratio," << NormReport::csv_header() << '\n';
    for (std::size_t k = 0; k < march.windows.size(); ++k) {
        const auto& w = march.windows[k];
        os << k << ',' << w.t0 << ',' << w.t1 << ',' << w.T1 << ',' << w.trace.iterations << ','
           << (w.trace.converged ? 1 : 0) << ',' << w.min_F_ratio << ',' << w.report.csv_row() << '\n';
    }
    return os.str();
}

} // namespace softboltz
