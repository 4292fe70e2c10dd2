#include "wgscatter/output.hpp"

#include <atomic>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "wgscatter/config.hpp"
#include "wgscatter/errors.hpp"

namespace wgscatter {

static_assert(std::endian::native == std::endian::little, "binary density format assumes a little-endian host");

namespace {

template <typename T>
void put(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

template <typename T>
T get(const std::string& in, std::size_t offset) {
    if (offset + sizeof(T) > in.size()) throw ConfigError("density file truncated");
    T v;
    std::memcpy(&v, in.data() + offset, sizeof(T));
    return v;
}

}  // namespace

std::string density_binary(const DensityMap& map) {
    if (map.values.size() != map.times.size() * map.z.size())
        throw std::invalid_argument("density map shape mismatch");
    std::string out;
    out.reserve(64 + 8 * (map.times.size() + map.values.size()));
    out.append(kDensityMagic, 8);
    put<std::uint32_t>(out, kDensityFormatVersion);
    put<std::uint32_t>(out, 0);
    put<std::uint64_t>(out, map.times.size());
    put<std::uint64_t>(out, map.z.size());
    put<double>(out, map.z.empty() ? 0.0 : map.z.front());
    put<double>(out, map.z.empty() ? 0.0 : map.z.back());
    out.append(16, '\0');
    for (double t : map.times) put(out, t);
    for (double v : map.values) put(out, v);
    return out;
}

DensityMap parse_density_binary(const std::string& bytes) {
    if (bytes.size() < 64 || std::memcmp(bytes.data(), kDensityMagic, 8) != 0)
        throw ConfigError("not a density file (bad magic)");
    if (get<std::uint32_t>(bytes, 8) != kDensityFormatVersion) throw ConfigError("unsupported density file version");
    const auto nt = get<std::uint64_t>(bytes, 16);
    const auto nz = get<std::uint64_t>(bytes, 24);
    const double z_min = get<double>(bytes, 32);
    const double z_max = get<double>(bytes, 40);
    if (bytes.size() != 64 + 8 * (nt + nt * nz)) throw ConfigError("density file size does not match its header");

    DensityMap m;
    m.times.resize(nt);
    m.values.resize(nt * nz);
    std::memcpy(m.times.data(), bytes.data() + 64, 8 * nt);
    std::memcpy(m.values.data(), bytes.data() + 64 + 8 * nt, 8 * nt * nz);
    m.z.resize(nz);
    for (std::size_t i = 0; i < nz; ++i)
        m.z[i] = nz > 1 ? z_min + (z_max - z_min) * static_cast<double>(i) / static_cast<double>(nz - 1) : z_min;
    if (nz > 0) m.z.back() = z_max;
    return m;
}

std::string header_block(const std::string& title, const Grid& grid, const PhysicalParams& params) {
    std::ostringstream os;
    os << "# " << title << "\n"
       << "# units: gamma = v_g = 1; t in 1/gamma, z in v_g/gamma, kappa in gamma/v_g\n"
       << "# gamma = " << format_double(params.gamma) << ", v_g = " << format_double(params.group_velocity)
       << ", g = " << format_double(params.coupling) << ", k0 = " << (params.k0 ? format_double(*params.k0) : "none")
       << "\n"
       << "# grid: n_per_branch = " << grid.n_per_branch() << ", kappa_max = " << format_double(grid.kappa_max())
       << ", dk = " << format_double(grid.dk()) << "\n";
    return os.str();
}

std::string density_table(const DensityMap& map) {
    std::string out = "t\\z";
    for (double z : map.z) (out += '\t') += format_double(z);
    out += '\n';
    for (std::size_t it = 0; it < map.times.size(); ++it) {
        out += format_double(map.times[it]);
        for (std::size_t iz = 0; iz < map.z.size(); ++iz) (out += '\t') += format_double(map.at(it, iz));
        out += '\n';
    }
    return out;
}

std::string matrix_table(const std::string& corner, const std::vector<double>& rows,
                         const std::vector<double>& cols, const Eigen::MatrixXd& values) {
    std::string out = corner;
    for (double c : cols) (out += '\t') += format_double(c);
    out += '\n';
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        out += format_double(rows[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < values.cols(); ++j) (out += '\t') += format_double(values(i, j));
        out += '\n';
    }
    return out;
}

std::vector<double> mode_kappas(const Grid& grid) {
    std::vector<double> k(grid.modes());
    for (std::size_t m = 0; m < grid.modes(); ++m) k[m] = grid.kappa_of_mode(m);
    return k;
}

std::vector<double> mode_branch_signs(const Grid& grid) {
    std::vector<double> s(grid.modes());
    for (std::size_t m = 0; m < grid.modes(); ++m) s[m] = propagation_sign(grid.branch_of_mode(m));
    return s;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    static std::atomic<unsigned> counter{0};
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error("short write to " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

StagingArea::StagingArea(std::filesystem::path destination) : destination_(std::move(destination)) {
    static std::atomic<unsigned> counter{0};
    std::filesystem::create_directories(destination_);
    staging_ = destination_ / (".staging." + std::to_string(::getpid()) + "." + std::to_string(counter++));
    std::filesystem::remove_all(staging_);
    std::filesystem::create_directory(staging_);
}

StagingArea::~StagingArea() {
    std::error_code ec;
    std::filesystem::remove_all(staging_, ec);
}

void StagingArea::write(const std::string& name, const std::string& content) {
    if (committed_) throw std::logic_error("staging area already committed");
    write_file_atomic(staging_ / name, content);
    names_.push_back(name);
}

void StagingArea::commit() {
    for (const auto& n : names_) std::filesystem::rename(staging_ / n, destination_ / n);
    committed_ = true;
}

}  // namespace wgscatter
