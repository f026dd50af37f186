#pragma once

// 8-bit grayscale raster, PNG encode/decode via libpng, and a 5x7 caption font.

#include <array>
#include <cctype>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <png.h>

#include "mriaug/error.hpp"

namespace mriaug {

struct Gray8 {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels; // row-major, top row first

    Gray8() = default;
    Gray8(std::size_t w, std::size_t h, std::uint8_t fill = 0) : width(w), height(h), pixels(w * h, fill) {}

    std::uint8_t& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
    std::uint8_t at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }

    void blit(const Gray8& src, std::size_t x0, std::size_t y0) {
        for (std::size_t y = 0; y < src.height && y0 + y < height; ++y)
            for (std::size_t x = 0; x < src.width && x0 + x < width; ++x) at(x0 + x, y0 + y) = src.at(x, y);
    }
};

namespace detail {

struct PngFile {
    std::FILE* f = nullptr;
    ~PngFile() {
        if (f) std::fclose(f);
    }
};

inline void png_error_handler(png_structp png, png_const_charp) { longjmp(png_jmpbuf(png), 1); }
inline void png_warning_handler(png_structp, png_const_charp) {}

} // namespace detail

inline void write_png(const Gray8& img, const std::filesystem::path& path) {
    if (img.width == 0 || img.height == 0) fail(ErrorCode::BadShape, "empty image");
    detail::PngFile file{std::fopen(path.string().c_str(), "wb")};
    if (!file.f) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, detail::png_error_handler, detail::png_warning_handler);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        fail(ErrorCode::Internal, "libpng initialization failed");
    }
    std::vector<png_bytep> rows(img.height);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(ErrorCode::IoError, "libpng failed writing " + path.string());
    }
    png_init_io(png, file.f);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::size_t y = 0; y < img.height; ++y) rows[y] = const_cast<png_bytep>(img.pixels.data() + y * img.width);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

/// Reads an 8-bit grayscale PNG (other formats are converted to 8-bit gray).
inline Gray8 read_png(const std::filesystem::path& path) {
    detail::PngFile file{std::fopen(path.string().c_str(), "rb")};
    if (!file.f) fail(ErrorCode::IoError, "cannot open " + path.string());
    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, detail::png_error_handler, detail::png_warning_handler);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(ErrorCode::Internal, "libpng initialization failed");
    }
    Gray8 img;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(ErrorCode::IoError, "libpng failed reading " + path.string());
    }
    png_init_io(png, file.f);
    png_read_info(png, info);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_packing(png);
    png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_color_type(png, info) & PNG_COLOR_MASK_COLOR) png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    if (png_get_color_type(png, info) == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    png_read_update_info(png, info);
    img = Gray8(png_get_image_width(png, info), png_get_image_height(png, info));
    rows.resize(img.height);
    for (std::size_t y = 0; y < img.height; ++y) rows[y] = img.pixels.data() + y * img.width;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

// ---------------------------------------------------------------------------
// 5x7 font; lowercase renders as uppercase, unknown characters as '?'.

namespace font {

inline constexpr std::size_t glyph_width = 5;
inline constexpr std::size_t glyph_height = 7;
inline constexpr std::size_t advance = 6;

struct Glyph {
    char c;
    std::array<std::uint8_t, 7> rows;
};

inline constexpr std::array<Glyph, 50> glyphs{{
    {'A', {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}}, {'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}},
    {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}}, {'D', {0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C}},
    {'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}}, {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
    {'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}}, {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}}, {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}},
    {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}}, {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
    {'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}}, {'N', {0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11}},
    {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}}, {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}},
    {'Q', {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}}, {'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}},
    {'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}}, {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
    {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}}, {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}},
    {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}}, {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
    {'Y', {0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04}}, {'Z', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}},
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}}, {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}}, {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}}, {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}}, {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}}, {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}}, {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
    {'=', {0x00, 0x00, 0x1F, 0x00, 0x1F, 0x00, 0x00}}, {':', {0x00, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00}},
    {',', {0x00, 0x00, 0x00, 0x00, 0x0C, 0x04, 0x08}}, {'[', {0x0E, 0x08, 0x08, 0x08, 0x08, 0x08, 0x0E}},
    {']', {0x0E, 0x02, 0x02, 0x02, 0x02, 0x02, 0x0E}}, {'(', {0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02}},
    {')', {0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08}}, {'/', {0x00, 0x01, 0x02, 0x04, 0x08, 0x10, 0x00}},
    {'_', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x1F}}, {' ', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00}},
    {'+', {0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00}}, {'?', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x00, 0x04}},
}};

inline const Glyph& glyph(char c) {
    const char u = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (const Glyph& g : glyphs)
        if (g.c == u) return g;
    return glyphs.back();
}

inline std::size_t text_width(std::string_view s) { return s.empty() ? 0 : s.size() * advance - 1; }

inline void draw_text(Gray8& img, std::size_t x0, std::size_t y0, std::string_view s, std::uint8_t ink = 255) {
    for (std::size_t k = 0; k < s.size(); ++k) {
        const Glyph& g = glyph(s[k]);
        for (std::size_t r = 0; r < glyph_height; ++r)
            for (std::size_t c = 0; c < glyph_width; ++c)
                if (g.rows[r] & (0x10 >> c)) {
                    const std::size_t x = x0 + k * advance + c, y = y0 + r;
                    if (x < img.width && y < img.height) img.at(x, y) = ink;
                }
    }
}

} // namespace font

} // namespace mriaug
