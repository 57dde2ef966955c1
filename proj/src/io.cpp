#include "eoslab/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace eoslab {

namespace {

void require_stream(const std::ofstream& out, const std::string& path) {
    if (!out) throw Error("cannot write " + path);
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

// diverging blue-white-red map on [-1, 1]
std::string diverging_color(double t) {
    t = std::clamp(t, -1.0, 1.0);
    int r, g, b;
    if (t >= 0.0) {
        r = 255;
        g = static_cast<int>(std::lround(255 * (1.0 - t)));
        b = g;
    } else {
        b = 255;
        g = static_cast<int>(std::lround(255 * (1.0 + t)));
        r = g;
    }
    std::ostringstream os;
    os << "rgb(" << r << "," << g << "," << b << ")";
    return os.str();
}

void svg_heatmap(std::ofstream& out, int nx, int ny,
                 const std::function<double(int, int)>& value, double vmax,
                 const std::string& title, const std::string& xlab, const std::string& ylab) {
    const int cell = std::max(1, 640 / std::max(nx, ny));
    const int w = nx * cell, h = ny * cell;
    const int mt = 28, ml = 46, mb = 34, mr = 12;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w + ml + mr << "\" height=\""
        << h + mt + mb << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty())
        out << "<text x=\"" << ml + w / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\" "
               "font-family=\"sans-serif\">"
            << title << "</text>\n";
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            double t = (vmax > 0.0) ? value(i, j) / vmax : 0.0;
            out << "<rect x=\"" << ml + i * cell << "\" y=\"" << mt + (ny - 1 - j) * cell
                << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
                << diverging_color(t) << "\"/>\n";
        }
    out << "<text x=\"" << ml + w / 2 << "\" y=\"" << mt + h + 24
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">" << xlab
        << "</text>\n";
    out << "<text x=\"14\" y=\"" << mt + h / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 14 "
        << mt + h / 2 << ")\">" << ylab << "</text>\n";
    out << "</svg>\n";
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot hash " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a64(ss.str());
}

void write_grid_csv(const QpdGrid& grid, const std::string& path) {
    std::ofstream out(path);
    require_stream(out, path);
    out << "x,y,value\n";
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.ny; ++j)
            out << fmt(grid.x_at(i)) << "," << fmt(grid.y_at(j)) << "," << fmt(grid.values(i, j))
                << "\n";
}

void write_grid_svg(const QpdGrid& grid, const std::string& path, const std::string& title) {
    std::ofstream out(path);
    require_stream(out, path);
    double vmax = grid.values.cwiseAbs().maxCoeff();
    svg_heatmap(
        out, grid.nx, grid.ny, [&](int i, int j) { return grid.values(i, j); }, vmax, title,
        "Re z", "Im z");
}

void write_count_table_csv(const CountTable& table, const std::string& path) {
    std::ofstream out(path);
    require_stream(out, path);
    for (std::size_t c = 0; c < table.lo.size(); ++c) out << "dn_" << c + 1 << ",";
    out << "p\n";
    for (std::size_t f = 0; f < table.size(); ++f) {
        OutcomeSet o = table.outcome_at(f);
        for (long long d : o.dn) out << d << ",";
        out << fmt(table.probs[f]) << "\n";
    }
}

void write_count_table_svg(const CountTable& table, const std::string& path,
                           const std::string& title) {
    if (table.lo.size() != 2) throw Error("count-table SVG requires exactly two channels");
    std::ofstream out(path);
    require_stream(out, path);
    int nx = static_cast<int>(table.hi[0] - table.lo[0] + 1);
    int ny = static_cast<int>(table.hi[1] - table.lo[1] + 1);
    double vmax = *std::max_element(table.probs.begin(), table.probs.end());
    svg_heatmap(
        out, nx, ny,
        [&](int i, int j) {
            return table.probs[static_cast<std::size_t>(i) * table.strides[0] +
                               static_cast<std::size_t>(j)];
        },
        vmax, title, "dn_1", "dn_2");
}

void write_line_plot_svg(const std::vector<LineSeries>& series, const std::string& path,
                         const std::string& title, const std::string& xlabel,
                         const std::string& ylabel) {
    std::ofstream out(path);
    require_stream(out, path);
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            xmin = std::min(xmin, s.x[k]);
            xmax = std::max(xmax, s.x[k]);
            ymin = std::min(ymin, s.y[k]);
            ymax = std::max(ymax, s.y[k]);
        }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    double pad = 0.08 * (ymax - ymin + 1e-12);
    ymin -= pad;
    ymax += pad;
    const int W = 640, H = 420, ml = 60, mb = 44, mt = 30, mr = 16;
    auto X = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto Y = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mb - mt); };
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\" "
           "font-family=\"sans-serif\">"
        << title << "</text>\n";
    // axes
    out << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
        << H - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
        << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        double xv = xmin + k * (xmax - xmin) / 4.0;
        double yv = ymin + k * (ymax - ymin) / 4.0;
        out << "<text x=\"" << X(xv) << "\" y=\"" << H - mb + 16
            << "\" text-anchor=\"middle\" font-size=\"10\" font-family=\"sans-serif\">"
            << std::setprecision(3) << xv << "</text>\n";
        out << "<text x=\"" << ml - 6 << "\" y=\"" << Y(yv) + 3
            << "\" text-anchor=\"end\" font-size=\"10\" font-family=\"sans-serif\">"
            << std::setprecision(3) << yv << "</text>\n";
    }
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                            "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    int ci = 0;
    int legend_y = mt + 8;
    for (const auto& s : series) {
        std::string color = colors[ci % 8];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
        if (s.dashed) out << " stroke-dasharray=\"6 4\"";
        out << " points=\"";
        for (std::size_t k = 0; k < s.x.size(); ++k) out << X(s.x[k]) << "," << Y(s.y[k]) << " ";
        out << "\"/>\n";
        out << "<text x=\"" << W - mr - 4 << "\" y=\"" << legend_y
            << "\" text-anchor=\"end\" font-size=\"10\" fill=\"" << color
            << "\" font-family=\"sans-serif\">" << s.label << "</text>\n";
        legend_y += 14;
        ++ci;
    }
    out << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 8
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">" << xlabel
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 16 "
        << (mt + H - mb) / 2 << ")\">" << ylabel << "</text>\n";
    out << "</svg>\n";
}

Manifest::Manifest(std::string out_dir, std::string command, std::string resolved_config,
                   std::uint64_t seed)
    : out_dir_(std::move(out_dir)),
      command_(std::move(command)),
      config_(std::move(resolved_config)),
      seed_(seed) {}

void Manifest::record(const std::string& relative_path) { files_.push_back(relative_path); }

void Manifest::add_note(const std::string& key, const std::string& value) {
    notes_.emplace_back(key, value);
}

void Manifest::write() const {
    nlohmann::json j;
    j["command"] = command_;
    j["seed"] = seed_;
    j["library"] = "eoslab 1.0";
    j["config"] = config_;
    for (const auto& [k, v] : notes_) j["notes"][k] = v;
    j["files"] = nlohmann::json::array();
    for (const auto& f : files_) {
        std::ostringstream hash;
        hash << std::hex << std::setw(16) << std::setfill('0')
             << fnv1a64_file(out_dir_ + "/" + f);
        j["files"].push_back({{"path", f}, {"fnv1a64", hash.str()}});
    }
    std::ofstream out(out_dir_ + "/manifest.json");
    require_stream(out, out_dir_ + "/manifest.json");
    out << j.dump(2) << "\n";
}

}  // namespace eoslab
