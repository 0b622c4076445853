#include "fracmono/stepper/export.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace fracmono::stepper {

namespace {

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

template <typename T>
T to_little(T value) {
    if constexpr (std::endian::native == std::endian::little) return value;
    auto bits = std::bit_cast<std::uint64_t>(value);
    std::uint64_t swapped = 0;
    for (int i = 0; i < 8; ++i) swapped |= ((bits >> (8 * i)) & 0xffU) << (8 * (7 - i));
    return std::bit_cast<T>(swapped);
}

template <typename T>
void put(std::ostream& out, T value) {
    static_assert(sizeof(T) == 8);
    const T le = to_little(value);
    out.write(reinterpret_cast<const char*>(&le), sizeof le);
}

template <typename T>
T get(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof value);
    if (!in) throw std::runtime_error("state dump: truncated file");
    return to_little(value);
}

} // namespace

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& trajectory,
                          const std::vector<std::string>& comments) {
    for (const auto& c : comments) out << "# " << c << '\n';
    out << "t,norm_H,norm_V,newton_iters,residual\n";
    for (std::size_t n = 0; n < trajectory.times.size(); ++n) {
        const auto& d = trajectory.diagnostics[n];
        out << format_double(trajectory.times[n]) << ',' << format_double(d.norm_H) << ','
            << format_double(d.norm_V) << ',' << d.newton_iters << ',' << format_double(d.residual) << '\n';
    }
}

void write_state_dump(const std::filesystem::path& path, const TrajectoryRecord& trajectory) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    put<std::uint64_t>(out, trajectory.states.n_nodes());
    put<std::uint64_t>(out, trajectory.states.n_dof());
    put<double>(out, trajectory.beta);
    put<double>(out, trajectory.dt);
    for (double x : trajectory.states.flat()) put<double>(out, x);
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

StateDump read_state_dump(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    StateDump dump;
    const auto nodes = get<std::uint64_t>(in);
    const auto dof = get<std::uint64_t>(in);
    dump.beta = get<double>(in);
    dump.dt = get<double>(in);
    dump.states = NodalSeries(nodes, dof);
    for (auto& x : dump.states.flat()) x = get<double>(in);
    return dump;
}

} // namespace fracmono::stepper
