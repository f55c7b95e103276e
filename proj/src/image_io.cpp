#include "crease/image_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace crease {

namespace {

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw io_error("short write to " + path);
}

void put_u32le(std::vector<std::uint8_t>& v, std::uint32_t x) {
    v.push_back(static_cast<std::uint8_t>(x & 0xFF));
    v.push_back(static_cast<std::uint8_t>((x >> 8) & 0xFF));
    v.push_back(static_cast<std::uint8_t>((x >> 16) & 0xFF));
    v.push_back(static_cast<std::uint8_t>((x >> 24) & 0xFF));
}

std::uint32_t get_u32le(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8)
         | (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint32_t get_u32be(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16)
         | (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

void put_u32be(std::vector<std::uint8_t>& v, std::uint32_t x) {
    v.push_back(static_cast<std::uint8_t>((x >> 24) & 0xFF));
    v.push_back(static_cast<std::uint8_t>((x >> 16) & 0xFF));
    v.push_back(static_cast<std::uint8_t>((x >> 8) & 0xFF));
    v.push_back(static_cast<std::uint8_t>(x & 0xFF));
}

// ---------------------------------------------------------------- PGM

struct PgmHeader {
    bool ascii = false;
    int width = 0, height = 0, maxval = 0;
    std::size_t data_offset = 0;
};

PgmHeader parse_pgm_header(const std::vector<std::uint8_t>& b, const std::string& path) {
    PgmHeader h;
    h.ascii = b[1] == '2';
    std::size_t pos = 2;
    auto next_int = [&]() -> int {
        for (;;) {
            while (pos < b.size() && std::isspace(b[pos])) ++pos;
            if (pos < b.size() && b[pos] == '#') {
                while (pos < b.size() && b[pos] != '\n') ++pos;
                continue;
            }
            break;
        }
        if (pos >= b.size() || !std::isdigit(b[pos])) throw io_error("malformed PGM header in " + path);
        int v = 0;
        while (pos < b.size() && std::isdigit(b[pos])) v = v * 10 + (b[pos++] - '0');
        return v;
    };
    h.width = next_int();
    h.height = next_int();
    h.maxval = next_int();
    if (h.width <= 0 || h.height <= 0 || h.maxval <= 0 || h.maxval > 65535)
        throw io_error("bad PGM dimensions in " + path);
    // Exactly one whitespace byte separates the header from binary data.
    if (!h.ascii) ++pos;
    h.data_offset = pos;
    return h;
}

ScalarField2D read_pgm(const std::vector<std::uint8_t>& b, const std::string& path) {
    PgmHeader h = parse_pgm_header(b, path);
    ScalarField2D u(h.width, h.height);
    const double scale = 1.0 / h.maxval;
    if (h.ascii) {
        std::size_t pos = h.data_offset;
        for (std::size_t i = 0; i < u.size(); ++i) {
            while (pos < b.size() && std::isspace(b[pos])) ++pos;
            if (pos >= b.size()) throw io_error("truncated P2 data in " + path);
            int v = 0;
            while (pos < b.size() && std::isdigit(b[pos])) v = v * 10 + (b[pos++] - '0');
            u.data[i] = v * scale;
        }
    } else {
        const int bytes = h.maxval > 255 ? 2 : 1;
        if (b.size() < h.data_offset + u.size() * bytes)
            throw io_error("truncated P5 data in " + path);
        const std::uint8_t* p = b.data() + h.data_offset;
        for (std::size_t i = 0; i < u.size(); ++i) {
            int v = bytes == 1 ? p[i] : (p[2 * i] << 8) | p[2 * i + 1];
            u.data[i] = v * scale;
        }
    }
    return u;
}

// ---------------------------------------------------------------- PNG

constexpr std::uint8_t kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::vector<std::uint8_t>& payload) {
    put_u32be(out, static_cast<std::uint32_t>(payload.size()));
    std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    std::uint32_t crc = static_cast<std::uint32_t>(
        ::crc32(0, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start)));
    put_u32be(out, crc);
}

std::vector<std::uint8_t> zlib_deflate(const std::vector<std::uint8_t>& raw) {
    uLongf cap = ::compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> out(cap);
    if (::compress2(out.data(), &cap, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw io_error("zlib compression failed");
    out.resize(cap);
    return out;
}

std::vector<std::uint8_t> zlib_inflate(const std::vector<std::uint8_t>& comp, std::size_t expect) {
    std::vector<std::uint8_t> out(expect);
    uLongf n = static_cast<uLongf>(expect);
    int rc = ::uncompress(out.data(), &n, comp.data(), static_cast<uLong>(comp.size()));
    if (rc != Z_OK || n != expect) throw io_error("zlib decompression failed");
    return out;
}

void write_png(const std::string& path, int width, int height, int channels,
               const std::uint8_t* pixels) {
    std::vector<std::uint8_t> ihdr;
    put_u32be(ihdr, static_cast<std::uint32_t>(width));
    put_u32be(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);                                   // bit depth
    ihdr.push_back(channels == 1 ? 0 : 2);               // gray / rgb
    ihdr.push_back(0);                                   // deflate
    ihdr.push_back(0);                                   // filter method
    ihdr.push_back(0);                                   // no interlace

    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    std::vector<std::uint8_t> raw;
    raw.reserve((stride + 1) * height);
    for (int y = 0; y < height; ++y) {
        raw.push_back(0); // filter type None
        raw.insert(raw.end(), pixels + y * stride, pixels + (y + 1) * stride);
    }

    std::vector<std::uint8_t> out(kPngSig, kPngSig + 8);
    append_chunk(out, "IHDR", ihdr);
    append_chunk(out, "IDAT", zlib_deflate(raw));
    append_chunk(out, "IEND", {});
    write_file(path, out);
}

int paeth(int a, int b, int c) {
    int p = a + b - c;
    int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

ScalarField2D read_png(const std::vector<std::uint8_t>& b, const std::string& path) {
    if (b.size() < 8 + 25 || std::memcmp(b.data(), kPngSig, 8) != 0)
        throw io_error("not a PNG file: " + path);
    std::size_t pos = 8;
    int width = 0, height = 0, depth = 0, color = 0;
    std::vector<std::uint8_t> idat;
    while (pos + 8 <= b.size()) {
        std::uint32_t len = get_u32be(b.data() + pos);
        if (pos + 12 + len > b.size()) throw io_error("truncated PNG chunk in " + path);
        const char* type = reinterpret_cast<const char*>(b.data() + pos + 4);
        const std::uint8_t* payload = b.data() + pos + 8;
        if (std::memcmp(type, "IHDR", 4) == 0) {
            width = static_cast<int>(get_u32be(payload));
            height = static_cast<int>(get_u32be(payload + 4));
            depth = payload[8];
            color = payload[9];
            if (payload[12] != 0) throw io_error("interlaced PNG not supported: " + path);
            if (depth != 8 && depth != 16) throw io_error("unsupported PNG bit depth in " + path);
            if (color != 0 && color != 2) throw io_error("unsupported PNG color type in " + path);
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), payload, payload + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            break;
        }
        pos += 12 + len;
    }
    if (width <= 0 || height <= 0 || idat.empty()) throw io_error("malformed PNG: " + path);

    const int channels = color == 0 ? 1 : 3;
    const int bpp = channels * depth / 8;
    const std::size_t stride = static_cast<std::size_t>(width) * bpp;
    std::vector<std::uint8_t> raw = zlib_inflate(idat, (stride + 1) * height);

    // Undo per-row filters in place (the +1 offset skips the filter byte).
    std::vector<std::uint8_t> prev(stride, 0);
    ScalarField2D u(width, height);
    const double scale = depth == 8 ? 1.0 / 255.0 : 1.0 / 65535.0;
    for (int y = 0; y < height; ++y) {
        std::uint8_t* row = raw.data() + y * (stride + 1);
        const int filter = row[0];
        std::uint8_t* cur = row + 1;
        for (std::size_t i = 0; i < stride; ++i) {
            int a = i >= static_cast<std::size_t>(bpp) ? cur[i - bpp] : 0;
            int up = prev[i];
            int c = i >= static_cast<std::size_t>(bpp) ? prev[i - bpp] : 0;
            int v = cur[i];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += up; break;
                case 3: v += (a + up) / 2; break;
                case 4: v += paeth(a, up, c); break;
                default: throw io_error("bad PNG filter type in " + path);
            }
            cur[i] = static_cast<std::uint8_t>(v & 0xFF);
        }
        std::memcpy(prev.data(), cur, stride);
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int ch = 0; ch < channels; ++ch) {
                const std::uint8_t* px = cur + (static_cast<std::size_t>(x) * channels + ch) * depth / 8;
                int v = depth == 8 ? px[0] : (px[0] << 8) | px[1];
                acc += v;
            }
            u.at(x, y) = acc / channels * scale;
        }
    }
    return u;
}

std::uint8_t quantize8(double v) {
    double c = std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(c * 255.0));
}

} // namespace

// ---------------------------------------------------------------- SF2D

void write_sf2d(const ScalarField2D& u, const std::string& path) {
    std::vector<std::uint8_t> out;
    out.reserve(16 + u.size() * 4);
    out.insert(out.end(), {'S', 'F', '2', 'D'});
    put_u32le(out, static_cast<std::uint32_t>(u.width));
    put_u32le(out, static_cast<std::uint32_t>(u.height));
    out.insert(out.end(), {0, 0, 0, 0});
    for (double v : u.data) {
        float f = static_cast<float>(v);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        put_u32le(out, bits);
    }
    write_file(path, out);
}

ScalarField2D read_sf2d(const std::string& path) {
    std::vector<std::uint8_t> b = read_file(path);
    if (b.size() < 16 || std::memcmp(b.data(), "SF2D", 4) != 0)
        throw io_error("not an SF2D stream: " + path);
    const int w = static_cast<int>(get_u32le(b.data() + 4));
    const int h = static_cast<int>(get_u32le(b.data() + 8));
    if (w <= 0 || h <= 0 || b.size() < 16 + static_cast<std::size_t>(w) * h * 4)
        throw io_error("truncated SF2D stream: " + path);
    ScalarField2D u(w, h);
    for (std::size_t i = 0; i < u.size(); ++i) {
        std::uint32_t bits = get_u32le(b.data() + 16 + 4 * i);
        float f;
        std::memcpy(&f, &bits, 4);
        u.data[i] = f;
    }
    return u;
}

// ---------------------------------------------------------------- dispatch

ScalarField2D read_image(const std::string& path) {
    std::vector<std::uint8_t> b = read_file(path);
    if (b.size() < 16) throw io_error("file too short: " + path);
    if (b[0] == 'P' && (b[1] == '2' || b[1] == '5')) return read_pgm(b, path);
    if (b[0] == 0x89 && b[1] == 'P') return read_png(b, path);
    if (std::memcmp(b.data(), "SF2D", 4) == 0) return read_sf2d(path);
    throw io_error("unrecognized image format: " + path);
}

void write_image(const ScalarField2D& u, const std::string& path) {
    auto ends_with = [&](const char* suffix) {
        std::size_t n = std::strlen(suffix);
        return path.size() >= n && path.compare(path.size() - n, n, suffix) == 0;
    };
    if (ends_with(".sf2d")) write_sf2d(u, path);
    else if (ends_with(".png")) write_png_gray(u, path);
    else if (ends_with(".pgm")) write_pgm(u, path);
    else throw io_error("unsupported output extension: " + path);
}

void write_pgm(const ScalarField2D& u, const std::string& path, int maxval) {
    if (maxval != 255 && maxval != 65535) throw parameter_error("PGM maxval must be 255 or 65535");
    char header[64];
    int n = std::snprintf(header, sizeof header, "P5\n%d %d\n%d\n", u.width, u.height, maxval);
    std::vector<std::uint8_t> out(header, header + n);
    for (double v : u.data) {
        double c = std::clamp(v, 0.0, 1.0);
        if (maxval == 255) {
            out.push_back(static_cast<std::uint8_t>(std::lround(c * 255.0)));
        } else {
            int q = static_cast<int>(std::lround(c * 65535.0));
            out.push_back(static_cast<std::uint8_t>(q >> 8));
            out.push_back(static_cast<std::uint8_t>(q & 0xFF));
        }
    }
    write_file(path, out);
}

void write_png_gray(const ScalarField2D& u, const std::string& path) {
    std::vector<std::uint8_t> px(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) px[i] = quantize8(u.data[i]);
    write_png(path, u.width, u.height, 1, px.data());
}

void write_png_rgb(const RgbImage& img, const std::string& path) {
    write_png(path, img.width, img.height, 3, img.data.data());
}

RgbImage to_rgb(const ScalarField2D& u) {
    RgbImage img(u.width, u.height);
    for (int y = 0; y < u.height; ++y)
        for (int x = 0; x < u.width; ++x) {
            std::uint8_t g = quantize8(u.at(x, y));
            img.set(x, y, {g, g, g});
        }
    return img;
}

namespace {

std::array<std::uint8_t, 3> gradient_color(double t) {
    // blue -> cyan -> yellow -> red
    static const double stops[4][3] = {
        {0.10, 0.15, 0.60}, {0.05, 0.75, 0.85}, {0.95, 0.90, 0.15}, {0.85, 0.10, 0.10}};
    t = std::clamp(t, 0.0, 1.0) * 3.0;
    int k = std::min(static_cast<int>(t), 2);
    double f = t - k;
    std::array<std::uint8_t, 3> c{};
    for (int i = 0; i < 3; ++i)
        c[i] = quantize8(stops[k][i] * (1.0 - f) + stops[k + 1][i] * f);
    return c;
}

} // namespace

void write_png_colormapped(const ScalarField2D& u, const std::string& path) {
    write_png_colormapped(u, path, min_value(u), max_value(u));
}

void write_png_colormapped(const ScalarField2D& u, const std::string& path,
                           double vmin, double vmax) {
    const double span = vmax > vmin ? vmax - vmin : 1.0;
    RgbImage img(u.width, u.height);
    for (int y = 0; y < u.height; ++y)
        for (int x = 0; x < u.width; ++x)
            img.set(x, y, gradient_color((u.at(x, y) - vmin) / span));
    write_png_rgb(img, path);
}

} // namespace crease
