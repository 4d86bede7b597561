#include "rlseg/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <zlib.h>

namespace rlseg {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("short write to " + path);
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::uint8_t quantize(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

// ---------------------------------------------------------------- PGM (P5)

std::string encode_pgm(const ScalarField2D& field) {
    std::string out = "P5\n" + std::to_string(field.grid.width) + " " +
                      std::to_string(field.grid.height) + "\n255\n";
    for (double v : field.values) out.push_back(static_cast<char>(quantize(v)));
    return out;
}

ScalarField2D decode_pgm(const std::string& data, const std::string& path) {
    std::size_t pos = 0;
    auto skip_space = [&]() {
        while (pos < data.size()) {
            if (std::isspace(static_cast<unsigned char>(data[pos]))) {
                ++pos;
            } else if (data[pos] == '#') {
                while (pos < data.size() && data[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    };
    auto token_int = [&](const char* what) {
        skip_space();
        const std::size_t start = pos;
        long value = 0;
        while (pos < data.size() && std::isdigit(static_cast<unsigned char>(data[pos]))) {
            value = value * 10 + (data[pos] - '0');
            ++pos;
        }
        if (pos == start)
            throw ParseError(path + ": expected " + std::string(what) + " in PGM header", pos);
        return value;
    };
    if (data.size() < 2 || data[0] != 'P' || data[1] != '5')
        throw ParseError(path + ": not a binary P5 PGM", 0);
    pos = 2;
    const long w = token_int("width");
    const long h = token_int("height");
    const long maxval = token_int("maxval");
    if (maxval != 255) throw ParseError(path + ": only maxval 255 is supported", pos);
    if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos])))
        throw ParseError(path + ": missing whitespace after PGM header", pos);
    ++pos;
    const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    if (data.size() - pos < need)
        throw ParseError(path + ": truncated PGM payload", data.size());
    ScalarField2D field(Grid2D(static_cast<int>(w), static_cast<int>(h)));
    for (std::size_t i = 0; i < need; ++i)
        field.values[i] = static_cast<double>(static_cast<std::uint8_t>(data[pos + i])) / 255.0;
    return field;
}

// ------------------------------------------------------------------- LSF1

constexpr char kLsfMagic[4] = {'L', 'S', 'F', '1'};

void put_u32le(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32le(const std::string& data, std::size_t pos) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos + i])) << (8 * i);
    return v;
}

// -------------------------------------------------------------------- PNG

const std::uint32_t* crc_table() {
    static std::uint32_t table[256];
    static bool ready = false;
    if (!ready) {
        for (std::uint32_t n = 0; n < 256; ++n) {
            std::uint32_t c = n;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
            table[n] = c;
        }
        ready = true;
    }
    return table;
}

std::uint32_t crc32_of(const std::string& data) {
    const std::uint32_t* table = crc_table();
    std::uint32_t c = 0xffffffffu;
    for (char ch : data) c = table[(c ^ static_cast<std::uint8_t>(ch)) & 0xff] ^ (c >> 8);
    return c ^ 0xffffffffu;
}

void put_u32be(std::string& buf, std::uint32_t v) {
    for (int i = 3; i >= 0; --i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32be(const std::string& data, std::size_t pos) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v = (v << 8) | static_cast<unsigned char>(data[pos + i]);
    return v;
}

void append_chunk(std::string& out, const char type[4], const std::string& payload) {
    put_u32be(out, static_cast<std::uint32_t>(payload.size()));
    std::string body(type, 4);
    body += payload;
    out += body;
    put_u32be(out, crc32_of(body));
}

std::string zlib_deflate(const std::string& raw) {
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::string out(bound, '\0');
    if (compress2(reinterpret_cast<Bytef*>(out.data()), &bound,
                  reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()),
                  6) != Z_OK)
        throw IoError("zlib compression failed");
    out.resize(bound);
    return out;
}

std::string zlib_inflate(const std::string& compressed, std::size_t expected,
                         const std::string& path, std::size_t offset) {
    std::string out(expected, '\0');
    uLongf len = static_cast<uLongf>(expected);
    const int rc = uncompress(reinterpret_cast<Bytef*>(out.data()), &len,
                              reinterpret_cast<const Bytef*>(compressed.data()),
                              static_cast<uLong>(compressed.size()));
    if (rc != Z_OK || len != expected)
        throw ParseError(path + ": corrupt PNG image data", offset);
    return out;
}

const char kPngSig[8] = {'\x89', 'P', 'N', 'G', '\r', '\n', '\x1a', '\n'};

std::string encode_png(int width, int height, int channels, const std::uint8_t* pixels) {
    // filter 0 per scanline
    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    std::string raw;
    raw.reserve(static_cast<std::size_t>(height) * (stride + 1));
    for (int y = 0; y < height; ++y) {
        raw.push_back('\0');
        raw.append(reinterpret_cast<const char*>(pixels + static_cast<std::size_t>(y) * stride),
                   stride);
    }
    std::string out(kPngSig, 8);
    std::string ihdr;
    put_u32be(ihdr, static_cast<std::uint32_t>(width));
    put_u32be(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);                                  // bit depth
    ihdr.push_back(channels == 1 ? '\0' : '\x02');      // gray / rgb
    ihdr.push_back('\0');                               // compression
    ihdr.push_back('\0');                               // filter method
    ihdr.push_back('\0');                               // no interlace
    append_chunk(out, "IHDR", ihdr);
    append_chunk(out, "IDAT", zlib_deflate(raw));
    append_chunk(out, "IEND", "");
    return out;
}

int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

std::vector<std::uint8_t> decode_png(const std::string& data, const std::string& path, int& width,
                                     int& height, int expect_channels) {
    if (data.size() < 8 || std::memcmp(data.data(), kPngSig, 8) != 0)
        throw ParseError(path + ": not a PNG file", 0);
    std::size_t pos = 8;
    bool seen_ihdr = false;
    int channels = 0;
    std::string idat;
    width = height = 0;
    while (pos + 8 <= data.size()) {
        const std::uint32_t len = get_u32be(data, pos);
        if (pos + 12 + len > data.size())
            throw ParseError(path + ": truncated PNG chunk", pos);
        const std::string type = data.substr(pos + 4, 4);
        const std::string body = data.substr(pos + 4, 4 + len);
        if (crc32_of(body) != get_u32be(data, pos + 8 + len))
            throw ParseError(path + ": PNG chunk CRC mismatch", pos + 8 + len);
        const std::string payload = data.substr(pos + 8, len);
        if (type == "IHDR") {
            if (len != 13) throw ParseError(path + ": bad IHDR length", pos);
            width = static_cast<int>(get_u32be(payload, 0));
            height = static_cast<int>(get_u32be(payload, 4));
            const int depth = payload[8], color = payload[9], interlace = payload[12];
            if (depth != 8) throw ParseError(path + ": only 8-bit PNG supported", pos + 16);
            if (color == 0)
                channels = 1;
            else if (color == 2)
                channels = 3;
            else
                throw ParseError(path + ": unsupported PNG color type", pos + 17);
            if (interlace != 0) throw ParseError(path + ": interlaced PNG unsupported", pos + 20);
            seen_ihdr = true;
        } else if (type == "IDAT") {
            idat += payload;
        } else if (type == "IEND") {
            break;
        }
        pos += 12 + len;
    }
    if (!seen_ihdr || width <= 0 || height <= 0)
        throw ParseError(path + ": missing PNG IHDR", pos);
    if (channels != expect_channels)
        throw ParseError(path + ": expected " + std::to_string(expect_channels) +
                             "-channel PNG, found " + std::to_string(channels),
                         8);
    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    const std::string raw =
        zlib_inflate(idat, static_cast<std::size_t>(height) * (stride + 1), path, pos);
    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(height) * stride);
    std::vector<std::uint8_t> prev(stride, 0);
    for (int y = 0; y < height; ++y) {
        const std::size_t base = static_cast<std::size_t>(y) * (stride + 1);
        const int filter = static_cast<std::uint8_t>(raw[base]);
        std::uint8_t* row = pixels.data() + static_cast<std::size_t>(y) * stride;
        for (std::size_t x = 0; x < stride; ++x) {
            const int v = static_cast<std::uint8_t>(raw[base + 1 + x]);
            const int a = x >= static_cast<std::size_t>(channels) ? row[x - channels] : 0;
            const int b = prev[x];
            const int c = x >= static_cast<std::size_t>(channels) ? prev[x - channels] : 0;
            int recon = 0;
            switch (filter) {
            case 0: recon = v; break;
            case 1: recon = v + a; break;
            case 2: recon = v + b; break;
            case 3: recon = v + (a + b) / 2; break;
            case 4: recon = v + paeth(a, b, c); break;
            default:
                throw ParseError(path + ": unknown PNG filter " + std::to_string(filter), base);
            }
            row[x] = static_cast<std::uint8_t>(recon & 0xff);
        }
        std::memcpy(prev.data(), row, stride);
    }
    return pixels;
}

} // namespace

ScalarField2D load_pgm(const std::string& path) { return decode_pgm(read_file(path), path); }

void save_pgm(const std::string& path, const ScalarField2D& field) {
    write_file(path, encode_pgm(field));
}

ScalarField2D load_png_gray(const std::string& path) {
    int w = 0, h = 0;
    const std::vector<std::uint8_t> pixels = decode_png(read_file(path), path, w, h, 1);
    ScalarField2D field(Grid2D(w, h));
    for (std::size_t i = 0; i < pixels.size(); ++i)
        field.values[i] = static_cast<double>(pixels[i]) / 255.0;
    return field;
}

void save_png_gray(const std::string& path, const ScalarField2D& field) {
    std::vector<std::uint8_t> pixels(field.values.size());
    for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = quantize(field.values[i]);
    write_file(path, encode_png(field.grid.width, field.grid.height, 1, pixels.data()));
}

void save_png_rgb(const std::string& path, int width, int height,
                  const std::vector<std::uint8_t>& rgb) {
    if (rgb.size() != static_cast<std::size_t>(width) * height * 3)
        throw ShapeError("rgb buffer size does not match dimensions");
    write_file(path, encode_png(width, height, 3, rgb.data()));
}

std::vector<std::uint8_t> load_png_rgb(const std::string& path, int& width, int& height) {
    return decode_png(read_file(path), path, width, height, 3);
}

ScalarField2D load_field_lsf(const std::string& path) {
    const std::string data = read_file(path);
    if (data.size() < 16 || std::memcmp(data.data(), kLsfMagic, 4) != 0)
        throw ParseError(path + ": bad LSF1 magic", 0);
    const std::uint32_t w = get_u32le(data, 4);
    const std::uint32_t h = get_u32le(data, 8);
    if (w == 0 || h == 0) throw ParseError(path + ": zero LSF1 dimensions", 4);
    const std::size_t need = 16 + static_cast<std::size_t>(w) * h * 4;
    if (data.size() < need) throw ParseError(path + ": truncated LSF1 payload", data.size());
    if (data.size() > need) throw ParseError(path + ": trailing bytes in LSF1 file", need);
    ScalarField2D field(Grid2D(static_cast<int>(w), static_cast<int>(h)));
    for (std::size_t i = 0; i < field.values.size(); ++i) {
        const std::uint32_t bits = get_u32le(data, 16 + i * 4);
        field.values[i] = static_cast<double>(std::bit_cast<float>(bits));
    }
    return field;
}

void save_field_lsf(const std::string& path, const ScalarField2D& field) {
    std::string buf(kLsfMagic, 4);
    put_u32le(buf, static_cast<std::uint32_t>(field.grid.width));
    put_u32le(buf, static_cast<std::uint32_t>(field.grid.height));
    put_u32le(buf, 0); // reserved
    for (double v : field.values)
        put_u32le(buf, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    write_file(path, buf);
}

ScalarField2D load_image(const std::string& path) {
    if (ends_with(path, ".pgm")) return load_pgm(path);
    if (ends_with(path, ".png")) return load_png_gray(path);
    if (ends_with(path, ".lsf")) return load_field_lsf(path);
    throw ConfigError("unsupported image format: " + path);
}

void save_image(const std::string& path, const ScalarField2D& field) {
    if (ends_with(path, ".pgm")) {
        save_pgm(path, field);
    } else if (ends_with(path, ".png")) {
        save_png_gray(path, field);
    } else if (ends_with(path, ".lsf")) {
        save_field_lsf(path, field);
    } else {
        throw ConfigError("unsupported image format: " + path);
    }
}

BinaryMask load_mask(const std::string& path) {
    const ScalarField2D field = load_image(path);
    BinaryMask mask(field.grid);
    for (std::size_t i = 0; i < field.values.size(); ++i)
        mask.values[i] = field.values[i] >= 0.5 ? 1 : 0;
    return mask;
}

void save_mask(const std::string& path, const BinaryMask& mask) {
    ScalarField2D field(mask.grid);
    for (std::size_t i = 0; i < mask.values.size(); ++i)
        field.values[i] = mask.values[i] ? 1.0 : 0.0;
    save_image(path, field);
}

void emit_heatmap(const ScalarField2D& field, const std::string& path) {
    const int w = field.grid.width, h = field.grid.height;
    double max_abs = 0.0;
    for (double v : field.values) {
        if (!std::isfinite(v)) throw ConfigError("heatmap input must be finite");
        max_abs = std::max(max_abs, std::abs(v));
    }
    const double scale = max_abs > 0.0 ? 1.0 / max_abs : 0.0;
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * h * 3);
    auto sign_at = [&](int x, int y) { return field.at(x, y) >= 0.0; };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double t = field.at(x, y) * scale; // [-1, 1]
            std::uint8_t r, g, b;
            if (t >= 0.0) {
                r = 255;
                g = b = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - t)));
            } else {
                b = 255;
                r = g = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 + t)));
            }
            const bool s = sign_at(x, y);
            const bool contour = s && ((x > 0 && !sign_at(x - 1, y)) || (x < w - 1 && !sign_at(x + 1, y)) ||
                                       (y > 0 && !sign_at(x, y - 1)) || (y < h - 1 && !sign_at(x, y + 1)));
            if (contour) {
                r = 0;
                g = 200;
                b = 0;
            }
            const std::size_t i = (static_cast<std::size_t>(y) * w + x) * 3;
            rgb[i] = r;
            rgb[i + 1] = g;
            rgb[i + 2] = b;
        }
    }
    save_png_rgb(path, w, h, rgb);
}

} // namespace rlseg
