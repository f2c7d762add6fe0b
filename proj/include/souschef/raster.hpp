#pragma once

// Minimal software rasterizer + PNG encoder (zlib-backed) used to attach a
// bitmap of the scene to live chat-completion requests. The drawing mirrors
// the SVG renderer: fixtures, regions, joint panels, movables, robot, and
// name labels in a 5x7 bitmap font.

#include <zlib.h>

#include <cstdint>
#include <string>
#include <vector>

#include "souschef/world.hpp"

namespace souschef {

struct Rgb {
    std::uint8_t r, g, b;
};

class Canvas {
public:
    Canvas(int w, int h, Rgb bg) : w_(w), h_(h), px_(static_cast<std::size_t>(w) * h * 3) {
        for (int i = 0; i < w * h; ++i) set_index(i, bg);
    }

    int width() const { return w_; }
    int height() const { return h_; }

    void set(int x, int y, Rgb c) {
        if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
        set_index(y * w_ + x, c);
    }

    void fill_rect(int x0, int y0, int x1, int y1, Rgb c) {
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x) set(x, y, c);
    }

    void fill_shape(const Shape& s, double scale, double world_h, Rgb c) {
        AABB b = s.bounds();
        int x0 = static_cast<int>(b.lo.x * scale), x1 = static_cast<int>(b.hi.x * scale) + 1;
        int y0 = static_cast<int>((world_h - b.hi.y) * scale);
        int y1 = static_cast<int>((world_h - b.lo.y) * scale) + 1;
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                Vec2 p{(x + 0.5) / scale, world_h - (y + 0.5) / scale};
                if (s.contains(p)) set(x, y, c);
            }
        }
    }

    /// 5x7 bitmap text (lowercase letters, digits, '-', '_', space).
    void text(int x, int y, const std::string& s, Rgb c) {
        for (char ch : s) {
            draw_glyph(x, y, ch, c);
            x += 6;
        }
    }

    /// Encode as PNG (8-bit RGB, filter 0 rows, single zlib-compressed IDAT).
    std::string to_png() const {
        std::vector<std::uint8_t> raw;
        raw.reserve(static_cast<std::size_t>(h_) * (static_cast<std::size_t>(w_) * 3 + 1));
        for (int y = 0; y < h_; ++y) {
            raw.push_back(0);  // filter: none
            const std::uint8_t* row = px_.data() + static_cast<std::size_t>(y) * w_ * 3;
            raw.insert(raw.end(), row, row + static_cast<std::size_t>(w_) * 3);
        }
        uLongf bound = compressBound(static_cast<uLong>(raw.size()));
        std::vector<std::uint8_t> compressed(bound);
        if (compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
            throw std::runtime_error("png: deflate failed");
        compressed.resize(bound);

        std::string out("\x89PNG\r\n\x1a\n", 8);
        auto be32 = [](std::uint32_t v) {
            std::string s(4, '\0');
            s[0] = static_cast<char>(v >> 24);
            s[1] = static_cast<char>(v >> 16);
            s[2] = static_cast<char>(v >> 8);
            s[3] = static_cast<char>(v);
            return s;
        };
        auto chunk = [&](const char* type, const std::string& data) {
            std::string body = std::string(type, 4) + data;
            std::uint32_t crc = static_cast<std::uint32_t>(
                crc32(0, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size())));
            out += be32(static_cast<std::uint32_t>(data.size()));
            out += body;
            out += be32(crc);
        };
        std::string ihdr = be32(static_cast<std::uint32_t>(w_)) + be32(static_cast<std::uint32_t>(h_));
        ihdr += '\x08';  // bit depth
        ihdr += '\x02';  // color type: truecolor
        ihdr += '\x00';  // compression
        ihdr += '\x00';  // filter
        ihdr += '\x00';  // interlace
        chunk("IHDR", ihdr);
        chunk("IDAT", std::string(reinterpret_cast<const char*>(compressed.data()), compressed.size()));
        chunk("IEND", "");
        return out;
    }

private:
    void set_index(int i, Rgb c) {
        px_[static_cast<std::size_t>(i) * 3] = c.r;
        px_[static_cast<std::size_t>(i) * 3 + 1] = c.g;
        px_[static_cast<std::size_t>(i) * 3 + 2] = c.b;
    }

    // Column-wise 5x7 glyphs; each entry packs 5 columns of 7 bits.
    static std::uint64_t glyph_bits(char c) {
        auto g = [](std::uint8_t c0, std::uint8_t c1, std::uint8_t c2, std::uint8_t c3,
                    std::uint8_t c4) {
            return static_cast<std::uint64_t>(c0) | (static_cast<std::uint64_t>(c1) << 7) |
                   (static_cast<std::uint64_t>(c2) << 14) | (static_cast<std::uint64_t>(c3) << 21) |
                   (static_cast<std::uint64_t>(c4) << 28);
        };
        switch (c) {
            case 'a': return g(0x20, 0x54, 0x54, 0x54, 0x78);
            case 'b': return g(0x7f, 0x48, 0x44, 0x44, 0x38);
            case 'c': return g(0x38, 0x44, 0x44, 0x44, 0x28);
            case 'd': return g(0x38, 0x44, 0x44, 0x48, 0x7f);
            case 'e': return g(0x38, 0x54, 0x54, 0x54, 0x18);
            case 'f': return g(0x08, 0x7e, 0x09, 0x01, 0x02);
            case 'g': return g(0x0c, 0x52, 0x52, 0x52, 0x3e);
            case 'h': return g(0x7f, 0x08, 0x04, 0x04, 0x78);
            case 'i': return g(0x00, 0x44, 0x7d, 0x40, 0x00);
            case 'j': return g(0x20, 0x40, 0x44, 0x3d, 0x00);
            case 'k': return g(0x7f, 0x10, 0x28, 0x44, 0x00);
            case 'l': return g(0x00, 0x41, 0x7f, 0x40, 0x00);
            case 'm': return g(0x7c, 0x04, 0x18, 0x04, 0x78);
            case 'n': return g(0x7c, 0x08, 0x04, 0x04, 0x78);
            case 'o': return g(0x38, 0x44, 0x44, 0x44, 0x38);
            case 'p': return g(0x7c, 0x14, 0x14, 0x14, 0x08);
            case 'q': return g(0x08, 0x14, 0x14, 0x18, 0x7c);
            case 'r': return g(0x7c, 0x08, 0x04, 0x04, 0x08);
            case 's': return g(0x48, 0x54, 0x54, 0x54, 0x20);
            case 't': return g(0x04, 0x3f, 0x44, 0x40, 0x20);
            case 'u': return g(0x3c, 0x40, 0x40, 0x20, 0x7c);
            case 'v': return g(0x1c, 0x20, 0x40, 0x20, 0x1c);
            case 'w': return g(0x3c, 0x40, 0x30, 0x40, 0x3c);
            case 'x': return g(0x44, 0x28, 0x10, 0x28, 0x44);
            case 'y': return g(0x0c, 0x50, 0x50, 0x50, 0x3c);
            case 'z': return g(0x44, 0x64, 0x54, 0x4c, 0x44);
            case '0': return g(0x3e, 0x51, 0x49, 0x45, 0x3e);
            case '1': return g(0x00, 0x42, 0x7f, 0x40, 0x00);
            case '2': return g(0x42, 0x61, 0x51, 0x49, 0x46);
            case '3': return g(0x21, 0x41, 0x45, 0x4b, 0x31);
            case '4': return g(0x18, 0x14, 0x12, 0x7f, 0x10);
            case '5': return g(0x27, 0x45, 0x45, 0x45, 0x39);
            case '6': return g(0x3c, 0x4a, 0x49, 0x49, 0x30);
            case '7': return g(0x01, 0x71, 0x09, 0x05, 0x03);
            case '8': return g(0x36, 0x49, 0x49, 0x49, 0x36);
            case '9': return g(0x06, 0x49, 0x49, 0x29, 0x1e);
            case '-': return g(0x08, 0x08, 0x08, 0x08, 0x08);
            case '_': return g(0x40, 0x40, 0x40, 0x40, 0x40);
            default: return 0;
        }
    }

    void draw_glyph(int x, int y, char c, Rgb col) {
        std::uint64_t bits = glyph_bits(c);
        for (int cx = 0; cx < 5; ++cx)
            for (int cy = 0; cy < 7; ++cy)
                if (bits & (1ULL << (cx * 7 + cy))) set(x + cx, y + cy, col);
    }

    int w_, h_;
    std::vector<std::uint8_t> px_;
};

/// Rasterize a state at `scale` px/m (mirrors render_svg's content).
inline std::string render_png(const WorldState& state, double scale = 160.0) {
    const Scene& scene = *state.scene;
    double wh = scene.bounds.y;
    Canvas canvas(static_cast<int>(scene.bounds.x * scale), static_cast<int>(wh * scale),
                  {251, 250, 247});
    for (const StaticBody& s : scene.statics)
        canvas.fill_shape(s.shape, scale, wh, s.tall ? Rgb{107, 107, 107} : Rgb{207, 197, 180});
    for (const Region& r : scene.regions)
        canvas.fill_shape(region_shape(state, r.id), scale, wh, {226, 236, 222});
    for (const ArticulatedJoint& j : scene.joints)
        if (auto panel = j.panel_shape(state.joint_value(j.id)))
            canvas.fill_shape(*panel, scale, wh, {140, 111, 70});
    for (const MovableBody& m : scene.movables)
        canvas.fill_shape(movable_shape(state, m.id), scale, wh, {217, 132, 82});
    canvas.fill_shape(Shape::of(base_disc(scene, state.robot)), scale, wh, {91, 127, 180});

    auto label = [&](const std::string& name, Vec2 at) {
        canvas.text(static_cast<int>(at.x * scale), static_cast<int>((wh - at.y) * scale) - 9,
                    name, {20, 20, 20});
    };
    for (const MovableBody& m : scene.movables)
        label(scene.table.name(m.id), movable_shape(state, m.id).bounds().lo);
    for (const ArticulatedJoint& j : scene.joints)
        label(scene.table.name(j.id), j.handle_point(state.joint_value(j.id)));
    for (const Region& r : scene.regions)
        if (scene.table.kind(r.id) == ObjectKind::Surface)
            label(scene.table.name(r.id), region_shape(state, r.id).bounds().center());
    return canvas.to_png();
}

}  // namespace souschef
