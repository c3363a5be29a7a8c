#include "hmf/serialize.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace hmf {

namespace {

void put_u64(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        buf.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
    }
}

std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
        v = (v << 8) | p[i];
    }
    return v;
}

std::string digest_stream(std::istream& in);

void put_f64(std::string& buf, double x) { put_u64(buf, std::bit_cast<std::uint64_t>(x)); }

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

}  // namespace

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::string text;
    for (std::size_t i = 0; i < header.size(); ++i) {
        text += (i ? "," : "") + header[i];
    }
    text += '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size()) {
            throw std::logic_error("write_csv: row width differs from header in " + path.string());
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) {
                text += ',';
            }
            text += format_real(row[i]);
        }
        text += '\n';
    }
    auto out = open_out(path);
    out << text;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_json(const std::filesystem::path& path, const json& value) {
    auto out = open_out(path);
    out << value.dump(2) << '\n';
}

void write_snapshots(const std::filesystem::path& path, const std::vector<FourierField>& snapshots) {
    std::string buf = "HMF1";
    const Grid g = snapshots.empty() ? Grid{} : snapshots.front().grid();
    put_u64(buf, snapshots.size());
    put_u64(buf, static_cast<std::uint64_t>(g.modes()));
    put_u64(buf, snapshots.empty() ? 0 : g.xi_count());
    buf.reserve(buf.size() + snapshots.size() * g.size() * 16);
    for (const auto& f : snapshots) {
        if (!(f.grid() == g)) {
            throw std::invalid_argument("write_snapshots: snapshots live on different grids");
        }
        for (const cplx& c : f.coeffs()) {
            put_f64(buf, c.real());
            put_f64(buf, c.imag());
        }
    }
    auto out = open_out(path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

json snapshot_sidecar(const Grid& grid, const std::vector<double>& times, const std::string& binary_name) {
    json j;
    j["format"] = "HMF1";
    j["file"] = binary_name;
    j["byte_order"] = "little-endian";
    j["layout"] = "snapshot, mode n = -n_max..n_max, xi node; complex as (re, im) float64";
    j["n_max"] = grid.n_max;
    j["xi_nodes"] = grid.xi_count();
    j["d_xi"] = grid.d_xi;
    j["xi_max"] = grid.xi_max;
    j["times"] = times;
    return j;
}

std::vector<FourierField> read_snapshots(const std::filesystem::path& path, const Grid& grid) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "'");
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < 28 || std::memcmp(bytes.data(), "HMF1", 4) != 0) {
        throw std::runtime_error("'" + path.string() + "' is not an HMF1 file");
    }
    const std::uint64_t count = get_u64(bytes.data() + 4);
    const std::uint64_t modes = get_u64(bytes.data() + 12);
    const std::uint64_t nx = get_u64(bytes.data() + 20);
    if (modes != static_cast<std::uint64_t>(grid.modes()) || nx != grid.xi_count()) {
        throw std::runtime_error("HMF1 dimensions do not match the grid");
    }
    if (bytes.size() != 28 + count * modes * nx * 16) {
        throw std::runtime_error("HMF1 payload size mismatch");
    }
    std::vector<FourierField> out;
    const unsigned char* p = bytes.data() + 28;
    for (std::uint64_t s = 0; s < count; ++s) {
        FourierField f(grid);
        for (cplx& c : f.coeffs()) {
            const double re = std::bit_cast<double>(get_u64(p));
            const double im = std::bit_cast<double>(get_u64(p + 8));
            c = {re, im};
            p += 16;
        }
        out.push_back(std::move(f));
    }
    return out;
}

std::string sha256_hex(const std::string& bytes) {
    std::istringstream in(bytes);
    return digest_stream(in);
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "' for hashing");
    }
    return digest_stream(in);
}

namespace {

std::string digest_stream(std::istream& in) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256: digest initialization failed");
    }
    std::array<char, 1 << 16> chunk{};
    while (in) {
        in.read(chunk.data(), chunk.size());
        if (in.gcount() > 0) {
            EVP_DigestUpdate(ctx.get(), chunk.data(), static_cast<std::size_t>(in.gcount()));
        }
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
    static constexpr char hex[] = "0123456789abcdef";
    std::string s;
    for (unsigned int i = 0; i < len; ++i) {
        s += hex[md[i] >> 4];
        s += hex[md[i] & 0xf];
    }
    return s;
}

}  // namespace

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        auto out = open_out(tmp);
        out << content;
        out.flush();
        if (!out) {
            throw std::runtime_error("write to '" + tmp.string() + "' failed");
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace hmf
