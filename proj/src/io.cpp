#include "normcraft/io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "normcraft/integrate.hpp"

namespace normcraft {

namespace {

void put_u32le(std::string& out, std::uint32_t v) {
    out.push_back(char(v & 0xff));
    out.push_back(char((v >> 8) & 0xff));
    out.push_back(char((v >> 16) & 0xff));
    out.push_back(char((v >> 24) & 0xff));
}

std::uint32_t get_u32le(const unsigned char* p) {
    return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
           (std::uint32_t(p[3]) << 24);
}

void put_f32le(std::string& out, float f) {
    std::uint32_t v;
    std::memcpy(&v, &f, 4);
    put_u32le(out, v);
}

float get_f32le(const unsigned char* p) {
    const std::uint32_t v = get_u32le(p);
    float f;
    std::memcpy(&f, &v, 4);
    return f;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return data;
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw DataError("short write to " + path);
}

NormalMap from_raw(int w, int h, const std::vector<Vec3>& raw, LoadStats* stats) {
    NormalMap map(w, h);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const Vec3& v = raw[map.index(r, c)];
            if (v.x == 0.0 && v.y == 0.0 && v.z == 0.0) {
                map.set_invalid(r, c);
                continue;
            }
            const double n = v.norm();
            if (stats && std::abs(n - 1.0) > 1e-3) ++stats->quantization_warnings;
            map.set(r, c, v * (1.0 / n));
        }
    }
    return map;
}

std::string lower_ext(const std::string& path) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return {};
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    return ext;
}

// ---- PNG helpers -----------------------------------------------------------

const unsigned char kPngSig[8] = {137, 80, 78, 71, 13, 10, 26, 10};

void put_u32be(std::string& out, std::uint32_t v) {
    out.push_back(char((v >> 24) & 0xff));
    out.push_back(char((v >> 16) & 0xff));
    out.push_back(char((v >> 8) & 0xff));
    out.push_back(char(v & 0xff));
}

std::uint32_t get_u32be(const unsigned char* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

void append_chunk(std::string& out, const char type[4], const std::string& payload) {
    put_u32be(out, static_cast<std::uint32_t>(payload.size()));
    const std::size_t start = out.size();
    out.append(type, 4);
    out += payload;
    const auto crc =
        crc32(0, reinterpret_cast<const Bytef*>(out.data() + start), uInt(out.size() - start));
    put_u32be(out, static_cast<std::uint32_t>(crc));
}

int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

}  // namespace

// ---- .nrm ------------------------------------------------------------------

void save_nrm(const NormalMap& n, const std::string& path) {
    std::string out;
    out.reserve(16 + n.size() * 12);
    out += "NRM1";
    put_u32le(out, static_cast<std::uint32_t>(n.width()));
    put_u32le(out, static_cast<std::uint32_t>(n.height()));
    put_u32le(out, 1);
    for (int r = 0; r < n.height(); ++r)
        for (int c = 0; c < n.width(); ++c) {
            if (!n.valid(r, c)) {
                put_f32le(out, 0.0f);
                put_f32le(out, 0.0f);
                put_f32le(out, 0.0f);
                continue;
            }
            const Vec3& v = n.at(r, c);
            put_f32le(out, float(v.x));
            put_f32le(out, float(v.y));
            put_f32le(out, float(v.z));
        }
    write_file(path, out);
}

NormalMap load_nrm(const std::string& path, LoadStats* stats) {
    const std::string data = read_file(path);
    if (data.size() < 16 || data.compare(0, 4, "NRM1") != 0)
        throw ParseError(path + ": not a NRM1 file");
    const auto* p = reinterpret_cast<const unsigned char*>(data.data());
    const std::uint32_t w = get_u32le(p + 4), h = get_u32le(p + 8), layout = get_u32le(p + 12);
    if (layout != 1) throw ParseError(path + ": unknown layout flag");
    if (w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20))
        throw ParseError(path + ": bad dimensions");
    const std::size_t expected = 16 + std::size_t(w) * h * 12;
    if (data.size() != expected)
        throw ParseError(path + ": truncated payload (" + std::to_string(data.size()) +
                         " of " + std::to_string(expected) + " bytes)");
    std::vector<Vec3> raw(std::size_t(w) * h);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const unsigned char* px = p + 16 + i * 12;
        raw[i] = {get_f32le(px), get_f32le(px + 4), get_f32le(px + 8)};
    }
    return from_raw(int(w), int(h), raw, stats);
}

// ---- .png (16-bit RGB) -----------------------------------------------------

void save_png(const NormalMap& n, const std::string& path) {
    const int w = n.width(), h = n.height();
    const std::size_t rowbytes = std::size_t(w) * 6 + 1;
    std::vector<unsigned char> scan(rowbytes * h, 0);
    for (int r = 0; r < h; ++r) {
        unsigned char* row = scan.data() + std::size_t(r) * rowbytes;
        row[0] = 0;  // filter: none
        for (int c = 0; c < w; ++c) {
            std::uint16_t s[3] = {0, 0, 0};
            if (n.valid(r, c)) {
                const Vec3& v = n.at(r, c);
                const double comp[3] = {v.x, v.y, v.z};
                for (int k = 0; k < 3; ++k) {
                    const double q = std::round((comp[k] + 1.0) / 2.0 * 65535.0);
                    s[k] = static_cast<std::uint16_t>(std::clamp(q, 0.0, 65535.0));
                }
            }
            for (int k = 0; k < 3; ++k) {
                row[1 + c * 6 + 2 * k] = static_cast<unsigned char>(s[k] >> 8);
                row[1 + c * 6 + 2 * k + 1] = static_cast<unsigned char>(s[k] & 0xff);
            }
        }
    }

    uLongf bound = compressBound(uLong(scan.size()));
    std::vector<unsigned char> compressed(bound);
    if (compress2(compressed.data(), &bound, scan.data(), uLong(scan.size()),
                  Z_DEFAULT_COMPRESSION) != Z_OK)
        throw DataError("png: deflate failed");

    std::string out(reinterpret_cast<const char*>(kPngSig), 8);
    std::string ihdr;
    put_u32be(ihdr, std::uint32_t(w));
    put_u32be(ihdr, std::uint32_t(h));
    ihdr.push_back(16);  // bit depth
    ihdr.push_back(2);   // color type: RGB
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    append_chunk(out, "IHDR", ihdr);
    append_chunk(out, "IDAT",
                 std::string(reinterpret_cast<const char*>(compressed.data()), bound));
    append_chunk(out, "IEND", "");
    write_file(path, out);
}

NormalMap load_png(const std::string& path, LoadStats* stats) {
    const std::string data = read_file(path);
    if (data.size() < 8 || std::memcmp(data.data(), kPngSig, 8) != 0)
        throw ParseError(path + ": not a PNG file");

    const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
    std::size_t pos = 8;
    std::uint32_t w = 0, h = 0;
    int depth = 0, color = 0;
    std::string idat;
    bool saw_ihdr = false, saw_iend = false;
    while (pos + 12 <= data.size() && !saw_iend) {
        const std::uint32_t len = get_u32be(bytes + pos);
        if (pos + 12 + len > data.size()) throw ParseError(path + ": truncated chunk");
        const std::string type(data, pos + 4, 4);
        const unsigned char* payload = bytes + pos + 8;
        if (type == "IHDR") {
            if (len != 13) throw ParseError(path + ": bad IHDR");
            w = get_u32be(payload);
            h = get_u32be(payload + 4);
            depth = payload[8];
            color = payload[9];
            if (payload[10] != 0 || payload[11] != 0)
                throw ParseError(path + ": unsupported compression/filter method");
            if (payload[12] != 0) throw ParseError(path + ": interlaced PNG not supported");
            if ((depth != 8 && depth != 16) || (color != 2 && color != 6))
                throw ParseError(path + ": only 8/16-bit RGB(A) supported");
            if (w == 0 || h == 0) throw ParseError(path + ": bad dimensions");
            saw_ihdr = true;
        } else if (type == "IDAT") {
            idat.append(reinterpret_cast<const char*>(payload), len);
        } else if (type == "IEND") {
            saw_iend = true;
        }
        pos += 12 + len;
    }
    if (!saw_ihdr || idat.empty()) throw ParseError(path + ": missing IHDR/IDAT");

    const int channels = color == 2 ? 3 : 4;
    const int sample_bytes = depth / 8;
    const std::size_t bpp = std::size_t(channels) * sample_bytes;
    const std::size_t rowbytes = 1 + std::size_t(w) * bpp;
    std::vector<unsigned char> scan(rowbytes * h);
    uLongf destlen = uLongf(scan.size());
    const int zrc = uncompress(scan.data(), &destlen,
                               reinterpret_cast<const Bytef*>(idat.data()), uLong(idat.size()));
    if (zrc != Z_OK || destlen != scan.size())
        throw ParseError(path + ": corrupt image data");

    // Undo per-row filters in place (raw bytes end up at offset 1 of each row).
    for (std::uint32_t r = 0; r < h; ++r) {
        unsigned char* row = scan.data() + std::size_t(r) * rowbytes;
        const unsigned char* prev = r > 0 ? row - rowbytes : nullptr;
        const int filter = row[0];
        const std::size_t nbytes = rowbytes - 1;
        for (std::size_t i = 0; i < nbytes; ++i) {
            const int x = row[1 + i];
            const int a = i >= bpp ? row[1 + i - bpp] : 0;
            const int b = prev ? prev[1 + i] : 0;
            const int cc = (prev && i >= bpp) ? prev[1 + i - bpp] : 0;
            int v;
            switch (filter) {
                case 0: v = x; break;
                case 1: v = x + a; break;
                case 2: v = x + b; break;
                case 3: v = x + (a + b) / 2; break;
                case 4: v = x + paeth(a, b, cc); break;
                default: throw ParseError(path + ": unknown scanline filter");
            }
            row[1 + i] = static_cast<unsigned char>(v & 0xff);
        }
    }

    std::vector<Vec3> raw(std::size_t(w) * h);
    for (std::uint32_t r = 0; r < h; ++r) {
        const unsigned char* row = scan.data() + std::size_t(r) * rowbytes + 1;
        for (std::uint32_t c = 0; c < w; ++c) {
            const unsigned char* px = row + std::size_t(c) * bpp;
            double comp[3];
            bool zero = true;
            for (int k = 0; k < 3; ++k) {
                std::uint32_t v;
                if (depth == 16)
                    v = (std::uint32_t(px[2 * k]) << 8) | px[2 * k + 1];
                else
                    v = px[k];
                if (v != 0) zero = false;
                comp[k] = double(v) / (depth == 16 ? 65535.0 : 255.0) * 2.0 - 1.0;
            }
            raw[std::size_t(r) * w + c] =
                zero ? Vec3{} : Vec3{comp[0], comp[1], comp[2]};
        }
    }
    return from_raw(int(w), int(h), raw, stats);
}

// ---- dispatch ----------------------------------------------------------------

NormalMap load_normal_map(const std::string& path, LoadStats* stats) {
    const std::string ext = lower_ext(path);
    if (ext == "nrm") return load_nrm(path, stats);
    if (ext == "png") return load_png(path, stats);
    throw ParseError(path + ": unsupported extension (.nrm or .png expected)");
}

void save_normal_map(const NormalMap& n, const std::string& path) {
    const std::string ext = lower_ext(path);
    if (ext == "nrm") return save_nrm(n, path);
    if (ext == "png") return save_png(n, path);
    throw ParseError(path + ": unsupported extension (.nrm or .png expected)");
}

// ---- depth raster ------------------------------------------------------------

void save_depth(const DepthMap& d, const std::string& path) {
    std::string out;
    out.reserve(16 + d.z.size() * 4);
    out += "DEP1";
    put_u32le(out, static_cast<std::uint32_t>(d.width));
    put_u32le(out, static_cast<std::uint32_t>(d.height));
    put_u32le(out, 1);
    for (std::size_t i = 0; i < d.z.size(); ++i)
        put_f32le(out, d.mask[i] ? float(d.z[i]) : std::nanf(""));
    write_file(path, out);
}

}  // namespace normcraft
