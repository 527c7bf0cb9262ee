#include "rcsac/svg.hpp"

#include <cstdio>
#include <fstream>

namespace rcsac {

namespace {

constexpr double kScale = 60.0;   // px per meter
constexpr double kMargin = 20.0;  // px

struct Mapper {
    const MazeSpec& spec;
    double px(double x) const { return kMargin + (x - spec.bounds.x_min) * kScale; }
    double py(double y) const { return kMargin + (spec.bounds.y_max - y) * kScale; }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

}  // namespace

void write_paths_svg(const std::filesystem::path& path, const MazeSpec& spec,
                     const std::vector<EpisodeTrace>& traces) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write SVG: " + path.string());
    const Mapper m{spec};
    const double w = spec.bounds.width() * kScale + 2 * kMargin;
    const double h = spec.bounds.height() * kScale + 2 * kMargin;

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\""
        << num(h) << "\" viewBox=\"0 0 " << num(w) << " " << num(h) << "\">\n";
    out << "  <path d=\"M " << num(m.px(spec.bounds.x_min)) << " " << num(m.py(spec.bounds.y_min))
        << " L " << num(m.px(spec.bounds.x_max)) << " " << num(m.py(spec.bounds.y_min)) << " L "
        << num(m.px(spec.bounds.x_max)) << " " << num(m.py(spec.bounds.y_max)) << " L "
        << num(m.px(spec.bounds.x_min)) << " " << num(m.py(spec.bounds.y_max))
        << " Z\" fill=\"none\" stroke=\"#333\" stroke-width=\"2\"/>\n";

    for (const Rect& r : spec.obstacles) {
        out << "  <rect x=\"" << num(m.px(r.x_min)) << "\" y=\"" << num(m.py(r.y_max))
            << "\" width=\"" << num(r.width() * kScale) << "\" height=\""
            << num(r.height() * kScale) << "\" fill=\"#b0b0b0\" stroke=\"#666\"/>\n";
    }

    out << "  <circle cx=\"" << num(m.px(spec.goal_x)) << "\" cy=\"" << num(m.py(spec.goal_y))
        << "\" r=\"" << num(spec.goal_radius * kScale)
        << "\" fill=\"#c8e6c9\" stroke=\"#2e7d32\"/>\n";

    for (std::size_t i = 0; i < traces.size(); ++i) {
        const EpisodeTrace& tr = traces[i];
        const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "  <polyline points=\"";
        for (std::size_t k = 0; k < tr.states.size(); ++k) {
            if (k) out << ' ';
            out << num(m.px(tr.states[k].x)) << ',' << num(m.py(tr.states[k].y));
        }
        out << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        if (!tr.states.empty()) {
            out << "  <circle cx=\"" << num(m.px(tr.states.front().x)) << "\" cy=\""
                << num(m.py(tr.states.front().y)) << "\" r=\"4\" fill=\"" << color << "\"/>\n";
        }
        out << "  <text x=\"" << num(w - kMargin - 110) << "\" y=\""
            << num(kMargin + 18 + 16 * static_cast<double>(i)) << "\" fill=\"" << color
            << "\" font-size=\"13\">delta = " << num(tr.delta) << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace rcsac
