#include "chemoflow/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace chemoflow {

namespace {

constexpr char kMagic[4] = {'C', 'N', 'S', '2'};
constexpr std::size_t kHeaderBytes = 4 + 3 * 4 + 3 * 8;

// Schema columns only; the extra F/G components are not serialized.
constexpr std::size_t kSchemaColumns = 18;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_f64(std::vector<std::uint8_t>& out, double v)
{
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
}

struct Reader {
    const std::vector<std::uint8_t>& bytes;
    std::size_t pos = 0;

    std::uint64_t raw(int width)
    {
        if (pos + static_cast<std::size_t>(width) > bytes.size()) throw std::runtime_error("snapshot: truncated");
        std::uint64_t v = 0;
        for (int b = 0; b < width; ++b) v |= static_cast<std::uint64_t>(bytes[pos++]) << (8 * b);
        return v;
    }
    std::uint32_t u32() { return static_cast<std::uint32_t>(raw(4)); }
    double f64() { return std::bit_cast<double>(raw(8)); }
    void fill(std::vector<double>& v)
    {
        for (double& x : v) x = f64();
    }
};

}  // namespace

std::string timeseries_header()
{
    std::string h;
    const auto& cols = record_columns();
    for (std::size_t k = 0; k < kSchemaColumns; ++k) h += (k ? "," : "") + std::string(cols[k].name);
    return h;
}

std::string format_timeseries(const std::vector<DiagnosticsRecord>& records)
{
    std::string out = timeseries_header() + "\n";
    const auto& cols = record_columns();
    char buf[40];
    for (const auto& r : records) {
        for (std::size_t k = 0; k < kSchemaColumns; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", r.*cols[k].field);
            if (k) out += ',';
            out += buf;
        }
        out += '\n';
    }
    return out;
}

std::vector<DiagnosticsRecord> parse_timeseries(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != timeseries_header())
        throw std::runtime_error("timeseries: header does not match the schema");
    std::vector<DiagnosticsRecord> out;
    const auto& cols = record_columns();
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        DiagnosticsRecord r;
        const char* p = line.c_str();
        for (std::size_t k = 0; k < kSchemaColumns; ++k) {
            char* end = nullptr;
            const double v = std::strtod(p, &end);
            const char expect = k + 1 < kSchemaColumns ? ',' : '\0';
            if (end == p || std::isinf(v) || *end != expect)
                throw std::runtime_error("timeseries: malformed row at line " + std::to_string(lineno));
            r.*cols[k].field = v;
            p = end + (expect ? 1 : 0);
        }
        out.push_back(r);
    }
    return out;
}

std::size_t snapshot_size(int nx, int ny)
{
    const std::size_t cells = static_cast<std::size_t>(nx) * ny;
    const std::size_t faces = static_cast<std::size_t>(nx + 1) * ny + static_cast<std::size_t>(nx) * (ny + 1);
    return kHeaderBytes + 8 * (2 * cells + faces);
}

std::vector<std::uint8_t> encode_snapshot(const State& s)
{
    const Grid& g = s.n.grid;
    std::vector<std::uint8_t> out;
    out.reserve(snapshot_size(g.nx(), g.ny()));
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    put_u32(out, kSnapshotVersion);
    put_u32(out, static_cast<std::uint32_t>(g.nx()));
    put_u32(out, static_cast<std::uint32_t>(g.ny()));
    put_f64(out, g.lx());
    put_f64(out, g.ly());
    put_f64(out, s.t);
    for (double v : s.n.values) put_f64(out, v);
    for (double v : s.c.values) put_f64(out, v);
    for (double v : s.u.ux) put_f64(out, v);
    for (double v : s.u.uy) put_f64(out, v);
    return out;
}

State decode_snapshot(const std::vector<std::uint8_t>& bytes)
{
    if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw std::runtime_error("snapshot: bad magic (expected CNS2)");
    Reader r{bytes, 4};
    const std::uint32_t version = r.u32();
    if (version != kSnapshotVersion) throw std::runtime_error("snapshot: unsupported version " + std::to_string(version));
    const std::uint32_t nx = r.u32(), ny = r.u32();
    if (nx == 0 || ny == 0 || nx > (1u << 16) || ny > (1u << 16)) throw std::runtime_error("snapshot: bad grid size");
    if (bytes.size() != snapshot_size(static_cast<int>(nx), static_cast<int>(ny)))
        throw std::runtime_error("snapshot: length does not match the grid");
    const double lx = r.f64(), ly = r.f64();
    State s(make_grid(static_cast<int>(nx), static_cast<int>(ny), lx, ly));
    s.t = r.f64();
    r.fill(s.n.values);
    r.fill(s.c.values);
    r.fill(s.u.ux);
    r.fill(s.u.uy);
    return s;
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size())))
        throw std::runtime_error("cannot write '" + path + "'");
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size())))
        throw std::runtime_error("cannot write '" + path + "'");
}

std::vector<std::uint8_t> read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace chemoflow
