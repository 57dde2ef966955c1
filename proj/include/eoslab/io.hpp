#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eoslab/eos_core.hpp"
#include "eoslab/phase_space.hpp"

namespace eoslab {

// FNV-1a 64-bit content hash used by run manifests.
std::uint64_t fnv1a64(const std::string& bytes);
std::uint64_t fnv1a64_file(const std::string& path);

// QpdGrid serialization: CSV with header "x,y,value", row-major.
void write_grid_csv(const QpdGrid& grid, const std::string& path);
// Heat map with a diverging color map centered at 0.
void write_grid_svg(const QpdGrid& grid, const std::string& path, const std::string& title = "");

void write_count_table_csv(const CountTable& table, const std::string& path);
// Heat map of a two-channel count table.
void write_count_table_svg(const CountTable& table, const std::string& path,
                           const std::string& title = "");

struct LineSeries {
    std::string label;
    std::vector<double> x, y;
    bool dashed = false;
};
void write_line_plot_svg(const std::vector<LineSeries>& series, const std::string& path,
                         const std::string& title, const std::string& xlabel,
                         const std::string& ylabel);

// Run manifest: resolved configuration plus one entry per emitted file with
// its content hash. Written before results as manifest.json in out_dir.
class Manifest {
public:
    Manifest(std::string out_dir, std::string command, std::string resolved_config,
             std::uint64_t seed);
    void record(const std::string& relative_path);
    void add_note(const std::string& key, const std::string& value);
    void write() const;

private:
    std::string out_dir_, command_, config_;
    std::uint64_t seed_;
    std::vector<std::pair<std::string, std::string>> notes_;
    std::vector<std::string> files_;
};

}  // namespace eoslab
