#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wgscatter/grid.hpp"
#include "wgscatter/observables.hpp"

namespace wgscatter {

// N(z, t) sampled at a list of times; values are row-major (time, z).
struct DensityMap {
    std::vector<double> times;
    std::vector<double> z;
    std::vector<double> values;

    double at(std::size_t it, std::size_t iz) const { return values[it * z.size() + iz]; }
};

// Flat binary layout, little-endian, 64-byte header:
//   0  char[8]  "WGSDNS01"
//   8  u32      format version (1)
//  12  u32      reserved (0)
//  16  u64      n_times
//  24  u64      n_z
//  32  f64      z_min
//  40  f64      z_max
//  48  u8[16]   reserved (0)
//  64  f64[n_times]        times
//      f64[n_times * n_z]  N(z, t), row-major by time
inline constexpr char kDensityMagic[8] = {'W', 'G', 'S', 'D', 'N', 'S', '0', '1'};
inline constexpr std::uint32_t kDensityFormatVersion = 1;

std::string density_binary(const DensityMap& map);
DensityMap parse_density_binary(const std::string& bytes);

// '#'-prefixed header lines stating units, the grid and the couplings, so
// every output file describes itself.
std::string header_block(const std::string& title, const Grid& grid, const PhysicalParams& params);

// First row "t\z" then z values; one row per time.
std::string density_table(const DensityMap& map);

// Matrix with axis rows: first row holds column coordinates, each following
// row starts with its row coordinate.
std::string matrix_table(const std::string& corner, const std::vector<double>& rows,
                         const std::vector<double>& cols, const Eigen::MatrixXd& values);

// Axis labels for k-space snapshots: kappa of each flat mode, and its branch
// as the propagation sign (+1 right, -1 left).
std::vector<double> mode_kappas(const Grid& grid);
std::vector<double> mode_branch_signs(const Grid& grid);

// Writes via a sibling temporary file and rename, so readers never see a
// half-written file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

// A private directory next to the destination. Files are written there and
// moved into place by commit(); if commit() never happens, the destructor
// deletes everything that was staged.
class StagingArea {
public:
    explicit StagingArea(std::filesystem::path destination);
    ~StagingArea();
    StagingArea(const StagingArea&) = delete;
    StagingArea& operator=(const StagingArea&) = delete;

    const std::filesystem::path& path() const { return staging_; }
    void write(const std::string& name, const std::string& content);
    // Moves every staged file into the destination (replacing same-named files).
    void commit();

private:
    std::filesystem::path destination_;
    std::filesystem::path staging_;
    std::vector<std::string> names_;
    bool committed_ = false;
};

}  // namespace wgscatter
