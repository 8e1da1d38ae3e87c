/*
 * Copyright (C) 2026 The sphlight Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sphlight/error.hpp"
#include "sphlight/image.hpp"

namespace sphlight {
namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open file for reading");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string(), "cannot open file for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError(path.string(), "write failed");
}

// Reads one '\n'-terminated line starting at pos; pos ends past the newline.
bool next_line(const std::vector<std::uint8_t>& bytes, std::size_t& pos, std::string& line) {
    if (pos >= bytes.size()) return false;
    const auto begin = bytes.begin() + static_cast<std::ptrdiff_t>(pos);
    const auto nl = std::find(begin, bytes.end(), std::uint8_t('\n'));
    line.assign(begin, nl);
    pos = static_cast<std::size_t>(nl - bytes.begin()) + (nl == bytes.end() ? 0 : 1);
    return nl != bytes.end();
}

// ---------------------------------------------------------------------------
// Radiance RGBE

using Rgbe = std::array<std::uint8_t, 4>;

void decode_rgbe(const Rgbe& p, double& r, double& g, double& b) {
    if (p[3] == 0) {
        r = g = b = 0.0;
        return;
    }
    const double f = std::ldexp(1.0, static_cast<int>(p[3]) - (128 + 8));
    r = p[0] * f;
    g = p[1] * f;
    b = p[2] * f;
}

Rgbe encode_rgbe(double r, double g, double b) {
    r = std::max(r, 0.0);
    g = std::max(g, 0.0);
    b = std::max(b, 0.0);
    const double v = std::max({r, g, b});
    if (v < 1e-38) return {0, 0, 0, 0};
    int e = 0;
    std::frexp(v, &e);
    auto quantize = [&](double c) { return std::lround(std::ldexp(c, 8 - e)); };
    if (quantize(v) > 255) ++e;  // rounding carried into the next octave
    if (e + 128 > 255) throw std::invalid_argument("value too large for RGBE");
    if (e + 128 < 1) return {0, 0, 0, 0};
    return {static_cast<std::uint8_t>(std::min<long>(quantize(r), 255)),
            static_cast<std::uint8_t>(std::min<long>(quantize(g), 255)),
            static_cast<std::uint8_t>(std::min<long>(quantize(b), 255)),
            static_cast<std::uint8_t>(e + 128)};
}

class ByteReader {
public:
    ByteReader(const std::vector<std::uint8_t>& bytes, std::size_t pos, const std::string& path)
        : bytes_(bytes), pos_(pos), path_(path) {}

    std::uint8_t next() {
        if (pos_ >= bytes_.size()) throw IoError(path_, "truncated scanline data", pos_);
        return bytes_[pos_++];
    }
    bool has(std::size_t n) const { return pos_ + n <= bytes_.size(); }
    std::uint8_t peek(std::size_t k) const { return bytes_[pos_ + k]; }
    std::size_t pos() const { return pos_; }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_;
    const std::string& path_;
};

// Flat pixels, possibly with old-style (1,1,1,n) repeat runs.
void read_flat_scanline(ByteReader& in, std::vector<Rgbe>& line, const std::string& path) {
    const std::size_t width = line.size();
    std::size_t x = 0;
    int shift = 0;
    while (x < width) {
        Rgbe p{in.next(), in.next(), in.next(), in.next()};
        if (p[0] == 1 && p[1] == 1 && p[2] == 1) {
            if (x == 0) throw IoError(path, "repeat run without a preceding pixel", in.pos());
            const std::size_t count = static_cast<std::size_t>(p[3]) << shift;
            if (x + count > width) throw IoError(path, "run overflows scanline", in.pos());
            std::fill_n(line.begin() + static_cast<std::ptrdiff_t>(x), count, line[x - 1]);
            x += count;
            shift += 8;
        } else {
            line[x++] = p;
            shift = 0;
        }
    }
}

void read_rle_scanline(ByteReader& in, std::vector<Rgbe>& line, const std::string& path) {
    const std::size_t width = line.size();
    in.next();
    in.next();
    const std::size_t encoded = (static_cast<std::size_t>(in.next()) << 8) | in.next();
    if (encoded != width) throw IoError(path, "scanline width mismatch", in.pos());
    for (int c = 0; c < 4; ++c) {
        std::size_t x = 0;
        while (x < width) {
            std::size_t count = in.next();
            if (count > 128) {
                count -= 128;
                if (x + count > width) throw IoError(path, "run overflows scanline", in.pos());
                const std::uint8_t value = in.next();
                for (std::size_t k = 0; k < count; ++k) line[x++][c] = value;
            } else {
                if (count == 0) throw IoError(path, "zero-length run", in.pos());
                if (x + count > width) throw IoError(path, "dump overflows scanline", in.pos());
                for (std::size_t k = 0; k < count; ++k) line[x++][c] = in.next();
            }
        }
    }
}

// New-style RLE for one component plane of a scanline.
void write_rle_component(std::vector<std::uint8_t>& out, const std::vector<std::uint8_t>& data) {
    constexpr std::size_t kMinRun = 4;
    const std::size_t n = data.size();
    std::size_t cur = 0;
    while (cur < n) {
        std::size_t beg_run = cur;
        std::size_t run_count = 0;
        std::size_t old_run_count = 0;
        while (run_count < kMinRun && beg_run < n) {
            beg_run += run_count;
            old_run_count = run_count;
            run_count = 1;
            while (beg_run + run_count < n && run_count < 127 &&
                   data[beg_run] == data[beg_run + run_count])
                ++run_count;
        }
        // A short run right before a long one is cheaper as a run.
        if (old_run_count > 1 && old_run_count == beg_run - cur) {
            out.push_back(static_cast<std::uint8_t>(128 + old_run_count));
            out.push_back(data[cur]);
            cur = beg_run;
        }
        while (cur < beg_run) {
            const std::size_t dump = std::min<std::size_t>(beg_run - cur, 128);
            out.push_back(static_cast<std::uint8_t>(dump));
            out.insert(out.end(), data.begin() + static_cast<std::ptrdiff_t>(cur),
                       data.begin() + static_cast<std::ptrdiff_t>(cur + dump));
            cur += dump;
        }
        if (run_count >= kMinRun) {
            out.push_back(static_cast<std::uint8_t>(128 + run_count));
            out.push_back(data[beg_run]);
            cur += run_count;
        }
    }
}

// ---------------------------------------------------------------------------
// PFM

template <typename T>
T byteswap_value(T v) {
    std::array<std::uint8_t, sizeof(T)> raw;
    std::memcpy(raw.data(), &v, sizeof(T));
    std::reverse(raw.begin(), raw.end());
    std::memcpy(&v, raw.data(), sizeof(T));
    return v;
}

}  // namespace

EquirectImage load_hdr(const std::filesystem::path& path) {
    const std::string name = path.string();
    const auto bytes = read_file(path);

    std::size_t pos = 0;
    std::string line;
    if (!next_line(bytes, pos, line) || line.rfind("#?", 0) != 0)
        throw IoError(name, "missing #?RADIANCE magic", 0);
    for (;;) {
        const std::size_t line_start = pos;
        if (!next_line(bytes, pos, line)) throw IoError(name, "unterminated header", line_start);
        if (line.empty()) break;
        if (line.rfind("FORMAT=", 0) == 0 && line != "FORMAT=32-bit_rle_rgbe")
            throw IoError(name, "unsupported pixel format '" + line.substr(7) + "'", line_start);
    }

    const std::size_t res_start = pos;
    if (!next_line(bytes, pos, line)) throw IoError(name, "missing resolution line", res_start);
    std::istringstream res(line);
    std::string ay, ax;
    long height = 0, width = 0;
    if (!(res >> ay >> height >> ax >> width))
        throw IoError(name, "malformed resolution line '" + line + "'", res_start);
    if (ay != "-Y" || ax != "+X")
        throw IoError(name, "unsupported pixel order '" + line + "'", res_start);
    if (width < 1 || height < 1 || width > (1 << 20) || height > (1 << 20))
        throw IoError(name, "invalid dimensions in '" + line + "'", res_start);

    EquirectImage img(static_cast<int>(width), static_cast<int>(height));
    ByteReader in(bytes, pos, name);
    std::vector<Rgbe> scan(static_cast<std::size_t>(width));
    for (int v = 0; v < height; ++v) {
        const bool rle = width >= 8 && width < 0x8000 && in.has(4) && in.peek(0) == 2 &&
                         in.peek(1) == 2 && (in.peek(2) & 0x80) == 0;
        if (rle)
            read_rle_scanline(in, scan, name);
        else
            read_flat_scanline(in, scan, name);
        for (int u = 0; u < width; ++u)
            decode_rgbe(scan[u], img.at(u, v, 0), img.at(u, v, 1), img.at(u, v, 2));
    }
    return img;
}

void save_hdr(const EquirectImage& image, const std::filesystem::path& path) {
    image.require_finite("HDR image");
    const int w = image.width(), h = image.height();
    std::vector<std::uint8_t> out;
    const std::string header = "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y " + std::to_string(h) +
                               " +X " + std::to_string(w) + "\n";
    out.insert(out.end(), header.begin(), header.end());

    const bool rle = w >= 8 && w < 0x8000;
    std::array<std::vector<std::uint8_t>, 4> planes;
    for (auto& p : planes) p.resize(w);
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            const Rgbe p = encode_rgbe(image.at(u, v, 0), image.at(u, v, 1), image.at(u, v, 2));
            for (int c = 0; c < 4; ++c) planes[c][u] = p[c];
        }
        if (!rle) {
            for (int u = 0; u < w; ++u)
                for (int c = 0; c < 4; ++c) out.push_back(planes[c][u]);
            continue;
        }
        out.push_back(2);
        out.push_back(2);
        out.push_back(static_cast<std::uint8_t>(w >> 8));
        out.push_back(static_cast<std::uint8_t>(w & 0xff));
        for (const auto& p : planes) write_rle_component(out, p);
    }
    write_file(path, out);
}

NormalMap load_pfm(const std::filesystem::path& path) {
    const std::string name = path.string();
    const auto bytes = read_file(path);

    // Header: three whitespace-separated tokens after the magic, then exactly
    // one whitespace byte before the raster.
    std::size_t pos = 0;
    auto token = [&]() {
        while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
        const std::size_t start = pos;
        while (pos < bytes.size() && !std::isspace(bytes[pos])) ++pos;
        return std::string(bytes.begin() + static_cast<std::ptrdiff_t>(start),
                           bytes.begin() + static_cast<std::ptrdiff_t>(pos));
    };
    const std::string magic = token();
    if (magic != "PF") throw IoError(name, "expected 3-channel PFM magic 'PF', got '" + magic + "'", 0);
    long width = 0, height = 0;
    double scale = 0.0;
    try {
        width = std::stol(token());
        height = std::stol(token());
        scale = std::stod(token());
    } catch (const std::exception&) {
        throw IoError(name, "malformed PFM header", pos);
    }
    if (width < 1 || height < 1 || width > (1 << 20) || height > (1 << 20))
        throw IoError(name, "invalid PFM dimensions", pos);
    if (scale == 0.0 || !std::isfinite(scale)) throw IoError(name, "invalid PFM scale", pos);
    ++pos;

    const std::size_t count = static_cast<std::size_t>(width) * height * 3;
    if (bytes.size() < pos + count * sizeof(float))
        throw IoError(name, "truncated PFM raster", bytes.size());
    const bool file_le = scale < 0.0;
    const bool swap = file_le != (std::endian::native == std::endian::little);

    NormalMap map(static_cast<int>(width), static_cast<int>(height));
    for (long row = 0; row < height; ++row) {
        // PFM rows run bottom to top.
        const int v = static_cast<int>(height - 1 - row);
        for (long u = 0; u < width; ++u) {
            float xyz[3];
            const std::size_t offset = pos + ((row * width + u) * 3) * sizeof(float);
            std::memcpy(xyz, bytes.data() + offset, sizeof(xyz));
            if (swap)
                for (float& f : xyz) f = byteswap_value(f);
            for (float f : xyz)
                if (!std::isfinite(f)) throw IoError(name, "non-finite normal component", offset);
            map.set(static_cast<int>(u), v, {xyz[0], xyz[1], xyz[2]});
        }
    }
    return map;
}

void save_pfm(const NormalMap& normals, const std::filesystem::path& path) {
    const int w = normals.width(), h = normals.height();
    const std::string header = "PF\n" + std::to_string(w) + " " + std::to_string(h) + "\n-1.0\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + static_cast<std::size_t>(w) * h * 3 * sizeof(float));
    const bool swap = std::endian::native != std::endian::little;
    for (int row = 0; row < h; ++row) {
        const int v = h - 1 - row;
        for (int u = 0; u < w; ++u) {
            const Vec3 n = normals.at(u, v);
            for (double c : {n.x, n.y, n.z}) {
                float f = static_cast<float>(c);
                if (swap) f = byteswap_value(f);
                std::uint8_t raw[sizeof(float)];
                std::memcpy(raw, &f, sizeof(float));
                out.insert(out.end(), raw, raw + sizeof(float));
            }
        }
    }
    write_file(path, out);
}

EquirectImage load_ldr(const std::filesystem::path& path) {
    const std::string name = path.string();
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, name.c_str()))
        throw IoError(name, std::string("cannot read PNG: ") + png.message);

    const auto native = png.format & ~PNG_FORMAT_FLAG_COLORMAP;
    if (native != PNG_FORMAT_RGB) {
        png_image_free(&png);
        throw IoError(name, "expected an 8-bit RGB PNG without alpha");
    }
    png.format = PNG_FORMAT_RGB;
    std::vector<png_byte> buffer(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr))
        throw IoError(name, std::string("cannot decode PNG: ") + png.message);
    if (png.width == 0 || png.height == 0) throw IoError(name, "PNG has zero dimension");

    std::array<double, 256> lut;
    for (int b = 0; b < 256; ++b) lut[b] = gamma_decode(static_cast<std::uint8_t>(b));

    const int w = static_cast<int>(png.width), h = static_cast<int>(png.height);
    EquirectImage img(w, h);
    for (int v = 0; v < h; ++v)
        for (int u = 0; u < w; ++u)
            for (int c = 0; c < 3; ++c)
                img.at(u, v, c) = lut[buffer[(static_cast<std::size_t>(v) * w + u) * 3 + c]];
    return img;
}

void save_ldr(const EquirectImage& image, const std::filesystem::path& path) {
    const std::string name = path.string();
    const int w = image.width(), h = image.height();
    std::vector<png_byte> buffer(static_cast<std::size_t>(w) * h * 3);
    for (int v = 0; v < h; ++v)
        for (int u = 0; u < w; ++u)
            for (int c = 0; c < 3; ++c)
                buffer[(static_cast<std::size_t>(v) * w + u) * 3 + c] =
                    gamma_encode(image.at(u, v, c));

    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(w);
    png.height = static_cast<png_uint_32>(h);
    png.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&png, name.c_str(), 0, buffer.data(), 0, nullptr))
        throw IoError(name, std::string("cannot write PNG: ") + png.message);
}

}  // namespace sphlight
