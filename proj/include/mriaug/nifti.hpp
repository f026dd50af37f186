#pragma once

// NIfTI-1 single-file (.nii, .nii.gz) and pair (.hdr/.img) reader, single-file writer.
// Field offsets follow the 348-byte nifti_1_header layout.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <zlib.h>

#include "mriaug/affine.hpp"
#include "mriaug/error.hpp"
#include "mriaug/grid.hpp"
#include "mriaug/volume.hpp"

namespace mriaug::nifti {

inline constexpr std::size_t header_size = 348;
inline constexpr std::size_t single_file_offset = 352;

enum class Datatype : std::int16_t {
    UInt8 = 2,
    Int16 = 4,
    Int32 = 8,
    Float32 = 16,
    Float64 = 64,
    UInt16 = 512,
};

inline std::optional<Datatype> datatype_from_code(std::int16_t code) {
    switch (code) {
    case 2: return Datatype::UInt8;
    case 4: return Datatype::Int16;
    case 8: return Datatype::Int32;
    case 16: return Datatype::Float32;
    case 64: return Datatype::Float64;
    case 512: return Datatype::UInt16;
    default: return std::nullopt;
    }
}

inline std::size_t bytes_per_voxel(Datatype t) {
    switch (t) {
    case Datatype::UInt8: return 1;
    case Datatype::Int16:
    case Datatype::UInt16: return 2;
    case Datatype::Int32:
    case Datatype::Float32: return 4;
    case Datatype::Float64: return 8;
    }
    return 0;
}

inline bool is_integer(Datatype t) { return t != Datatype::Float32 && t != Datatype::Float64; }

inline std::pair<double, double> integer_limits(Datatype t) {
    switch (t) {
    case Datatype::UInt8: return {0.0, 255.0};
    case Datatype::Int16: return {-32768.0, 32767.0};
    case Datatype::UInt16: return {0.0, 65535.0};
    case Datatype::Int32: return {-2147483648.0, 2147483647.0};
    default: return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    }
}

struct Header {
    std::int32_t sizeof_hdr = 348;
    std::array<char, 10> data_type{};
    std::array<char, 18> db_name{};
    std::int32_t extents = 0;
    std::int16_t session_error = 0;
    char regular = 0;
    std::uint8_t dim_info = 0;
    std::array<std::int16_t, 8> dim{};
    float intent_p1 = 0, intent_p2 = 0, intent_p3 = 0;
    std::int16_t intent_code = 0;
    std::int16_t datatype = 0;
    std::int16_t bitpix = 0;
    std::int16_t slice_start = 0;
    std::array<float, 8> pixdim{};
    float vox_offset = 0;
    float scl_slope = 0;
    float scl_inter = 0;
    std::int16_t slice_end = 0;
    std::uint8_t slice_code = 0;
    std::uint8_t xyzt_units = 0;
    float cal_max = 0, cal_min = 0;
    float slice_duration = 0;
    float toffset = 0;
    std::int32_t glmax = 0, glmin = 0;
    std::array<char, 80> descrip{};
    std::array<char, 24> aux_file{};
    std::int16_t qform_code = 0;
    std::int16_t sform_code = 0;
    float quatern_b = 0, quatern_c = 0, quatern_d = 0;
    float qoffset_x = 0, qoffset_y = 0, qoffset_z = 0;
    std::array<float, 4> srow_x{}, srow_y{}, srow_z{};
    std::array<char, 16> intent_name{};
    std::array<char, 4> magic{};

    bool big_endian = false; // byte order the header was read in

    bool single_file() const { return magic == std::array<char, 4>{'n', '+', '1', '\0'}; }
};

namespace detail {

class ByteReader {
public:
    ByteReader(std::span<const std::uint8_t> bytes, bool swap) : bytes_(bytes), swap_(swap) {}

    template <typename T>
    T get(std::size_t offset) const {
        std::array<std::uint8_t, sizeof(T)> raw{};
        std::memcpy(raw.data(), bytes_.data() + offset, sizeof(T));
        if (swap_) std::reverse(raw.begin(), raw.end());
        T v;
        std::memcpy(&v, raw.data(), sizeof(T));
        return v;
    }

    template <typename T, std::size_t N>
    std::array<T, N> get_array(std::size_t offset) const {
        std::array<T, N> a{};
        for (std::size_t i = 0; i < N; ++i) a[i] = get<T>(offset + i * sizeof(T));
        return a;
    }

    template <std::size_t N>
    std::array<char, N> chars(std::size_t offset) const {
        std::array<char, N> a{};
        std::memcpy(a.data(), bytes_.data() + offset, N);
        return a;
    }

private:
    std::span<const std::uint8_t> bytes_;
    bool swap_;
};

/// Little-endian writer.
class ByteWriter {
public:
    explicit ByteWriter(std::span<std::uint8_t> bytes) : bytes_(bytes) {}

    template <typename T>
    void put(std::size_t offset, T v) {
        std::array<std::uint8_t, sizeof(T)> raw{};
        std::memcpy(raw.data(), &v, sizeof(T));
        if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
        std::memcpy(bytes_.data() + offset, raw.data(), sizeof(T));
    }

    template <typename T, std::size_t N>
    void put_array(std::size_t offset, const std::array<T, N>& a) {
        for (std::size_t i = 0; i < N; ++i) put<T>(offset + i * sizeof(T), a[i]);
    }

    template <std::size_t N>
    void chars(std::size_t offset, const std::array<char, N>& a) {
        std::memcpy(bytes_.data() + offset, a.data(), N);
    }

private:
    std::span<std::uint8_t> bytes_;
};

inline std::int32_t raw_sizeof_hdr(std::span<const std::uint8_t> bytes, bool swap) {
    return ByteReader(bytes, swap).get<std::int32_t>(0);
}

} // namespace detail

/// Decodes the first 348 bytes. Byte order is detected from sizeof_hdr.
/// Total on any input of sufficient length: returns a header or throws Error.
inline Header parse_header(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < header_size)
        fail(ErrorCode::BadSize, "header needs 348 bytes, got " + std::to_string(bytes.size()));
    const bool native_big = std::endian::native == std::endian::big;
    bool file_big = false;
    if (detail::raw_sizeof_hdr(bytes, native_big) == 348) {
        file_big = false;
    } else if (detail::raw_sizeof_hdr(bytes, !native_big) == 348) {
        file_big = true;
    } else if (detail::raw_sizeof_hdr(bytes, native_big) == 540 || detail::raw_sizeof_hdr(bytes, !native_big) == 540) {
        fail(ErrorCode::UnsupportedVersion, "NIfTI-2 files are not supported");
    } else {
        fail(ErrorCode::BadSize, "sizeof_hdr is neither 348 little- nor big-endian");
    }
    const detail::ByteReader r(bytes, file_big != native_big);

    Header h;
    h.big_endian = file_big;
    h.sizeof_hdr = r.get<std::int32_t>(0);
    h.data_type = r.chars<10>(4);
    h.db_name = r.chars<18>(14);
    h.extents = r.get<std::int32_t>(32);
    h.session_error = r.get<std::int16_t>(36);
    h.regular = static_cast<char>(bytes[38]);
    h.dim_info = bytes[39];
    h.dim = r.get_array<std::int16_t, 8>(40);
    h.intent_p1 = r.get<float>(56);
    h.intent_p2 = r.get<float>(60);
    h.intent_p3 = r.get<float>(64);
    h.intent_code = r.get<std::int16_t>(68);
    h.datatype = r.get<std::int16_t>(70);
    h.bitpix = r.get<std::int16_t>(72);
    h.slice_start = r.get<std::int16_t>(74);
    h.pixdim = r.get_array<float, 8>(76);
    h.vox_offset = r.get<float>(108);
    h.scl_slope = r.get<float>(112);
    h.scl_inter = r.get<float>(116);
    h.slice_end = r.get<std::int16_t>(120);
    h.slice_code = bytes[122];
    h.xyzt_units = bytes[123];
    h.cal_max = r.get<float>(124);
    h.cal_min = r.get<float>(128);
    h.slice_duration = r.get<float>(132);
    h.toffset = r.get<float>(136);
    h.glmax = r.get<std::int32_t>(140);
    h.glmin = r.get<std::int32_t>(144);
    h.descrip = r.chars<80>(148);
    h.aux_file = r.chars<24>(228);
    h.qform_code = r.get<std::int16_t>(252);
    h.sform_code = r.get<std::int16_t>(254);
    h.quatern_b = r.get<float>(256);
    h.quatern_c = r.get<float>(260);
    h.quatern_d = r.get<float>(264);
    h.qoffset_x = r.get<float>(268);
    h.qoffset_y = r.get<float>(272);
    h.qoffset_z = r.get<float>(276);
    h.srow_x = r.get_array<float, 4>(280);
    h.srow_y = r.get_array<float, 4>(296);
    h.srow_z = r.get_array<float, 4>(312);
    h.intent_name = r.chars<16>(328);
    h.magic = r.chars<4>(344);

    static constexpr std::array<char, 4> n1{'n', '+', '1', '\0'};
    static constexpr std::array<char, 4> ni1{'n', 'i', '1', '\0'};
    if (h.magic != n1 && h.magic != ni1) fail(ErrorCode::BadMagic, "magic is not \"n+1\" or \"ni1\"");
    return h;
}

/// Little-endian 348-byte encoding of `h`.
inline std::array<std::uint8_t, header_size> serialize_header(const Header& h) {
    std::array<std::uint8_t, header_size> out{};
    detail::ByteWriter w(out);
    w.put<std::int32_t>(0, h.sizeof_hdr);
    w.chars(4, h.data_type);
    w.chars(14, h.db_name);
    w.put<std::int32_t>(32, h.extents);
    w.put<std::int16_t>(36, h.session_error);
    out[38] = static_cast<std::uint8_t>(h.regular);
    out[39] = h.dim_info;
    w.put_array(40, h.dim);
    w.put<float>(56, h.intent_p1);
    w.put<float>(60, h.intent_p2);
    w.put<float>(64, h.intent_p3);
    w.put<std::int16_t>(68, h.intent_code);
    w.put<std::int16_t>(70, h.datatype);
    w.put<std::int16_t>(72, h.bitpix);
    w.put<std::int16_t>(74, h.slice_start);
    w.put_array(76, h.pixdim);
    w.put<float>(108, h.vox_offset);
    w.put<float>(112, h.scl_slope);
    w.put<float>(116, h.scl_inter);
    w.put<std::int16_t>(120, h.slice_end);
    out[122] = h.slice_code;
    out[123] = h.xyzt_units;
    w.put<float>(124, h.cal_max);
    w.put<float>(128, h.cal_min);
    w.put<float>(132, h.slice_duration);
    w.put<float>(136, h.toffset);
    w.put<std::int32_t>(140, h.glmax);
    w.put<std::int32_t>(144, h.glmin);
    w.chars(148, h.descrip);
    w.chars(228, h.aux_file);
    w.put<std::int16_t>(252, h.qform_code);
    w.put<std::int16_t>(254, h.sform_code);
    w.put<float>(256, h.quatern_b);
    w.put<float>(260, h.quatern_c);
    w.put<float>(264, h.quatern_d);
    w.put<float>(268, h.qoffset_x);
    w.put<float>(272, h.qoffset_y);
    w.put<float>(276, h.qoffset_z);
    w.put_array(280, h.srow_x);
    w.put_array(296, h.srow_y);
    w.put_array(312, h.srow_z);
    w.chars(328, h.intent_name);
    w.chars(344, h.magic);
    return out;
}

/// sform if sform_code > 0, else qform if qform_code > 0, else diag(pixdim).
inline Mat4 header_affine(const Header& h) {
    if (h.sform_code > 0) {
        Mat4 m = identity_affine();
        for (int j = 0; j < 4; ++j) {
            m[0][j] = h.srow_x[j];
            m[1][j] = h.srow_y[j];
            m[2][j] = h.srow_z[j];
        }
        return m;
    }
    const Vec3 spacing{h.pixdim[1] != 0 ? h.pixdim[1] : 1.0, h.pixdim[2] != 0 ? h.pixdim[2] : 1.0,
                       h.pixdim[3] != 0 ? h.pixdim[3] : 1.0};
    if (h.qform_code > 0) {
        const double b = h.quatern_b, c = h.quatern_c, d = h.quatern_d;
        double a2 = 1.0 - (b * b + c * c + d * d);
        const double a = a2 > 1e-7 ? std::sqrt(a2) : 0.0;
        const double r[3][3] = {
            {a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)},
            {2 * (b * c + a * d), a * a + c * c - b * b - d * d, 2 * (c * d - a * b)},
            {2 * (b * d - a * c), 2 * (c * d + a * b), a * a + d * d - c * c - b * b},
        };
        const double qfac = h.pixdim[0] < 0 ? -1.0 : 1.0;
        Mat4 m = identity_affine();
        for (int i = 0; i < 3; ++i) {
            m[i][0] = r[i][0] * spacing[0];
            m[i][1] = r[i][1] * spacing[1];
            m[i][2] = r[i][2] * spacing[2] * qfac;
        }
        m[0][3] = h.qoffset_x;
        m[1][3] = h.qoffset_y;
        m[2][3] = h.qoffset_z;
        return m;
    }
    return diagonal_affine(spacing);
}

// ---------------------------------------------------------------------------
// gzip

inline bool is_gzip(std::span<const std::uint8_t> bytes) {
    return bytes.size() >= 2 && bytes[0] == 0x1F && bytes[1] == 0x8B;
}

inline std::vector<std::uint8_t> gunzip(std::span<const std::uint8_t> bytes) {
    z_stream zs{};
    if (inflateInit2(&zs, 15 + 32) != Z_OK) fail(ErrorCode::GzipError, "inflateInit2 failed");
    std::vector<std::uint8_t> out;
    std::array<std::uint8_t, 1 << 16> chunk{};
    zs.next_in = const_cast<Bytef*>(bytes.data());
    zs.avail_in = static_cast<uInt>(bytes.size());
    int rc = Z_OK;
    while (true) {
        zs.next_out = chunk.data();
        zs.avail_out = static_cast<uInt>(chunk.size());
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            fail(ErrorCode::GzipError, std::string("inflate failed: ") + (zs.msg ? zs.msg : "corrupt stream"));
        }
        out.insert(out.end(), chunk.data(), chunk.data() + (chunk.size() - zs.avail_out));
        if (rc == Z_STREAM_END) {
            // concatenated members
            if (zs.avail_in > 0 && is_gzip({zs.next_in, zs.avail_in})) {
                inflateReset(&zs);
                continue;
            }
            break;
        }
        if (zs.avail_in == 0 && zs.avail_out != 0) {
            inflateEnd(&zs);
            fail(ErrorCode::GzipError, "truncated gzip stream");
        }
    }
    inflateEnd(&zs);
    return out;
}

/// Deterministic gzip (zero mtime), so identical inputs give identical files.
inline std::vector<std::uint8_t> gzip(std::span<const std::uint8_t> bytes, int level = 6) {
    z_stream zs{};
    if (deflateInit2(&zs, level, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK)
        fail(ErrorCode::GzipError, "deflateInit2 failed");
    std::vector<std::uint8_t> out(deflateBound(&zs, static_cast<uLong>(bytes.size())) + 32);
    zs.next_in = const_cast<Bytef*>(bytes.data());
    zs.avail_in = static_cast<uInt>(bytes.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = deflate(&zs, Z_FINISH);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) fail(ErrorCode::GzipError, "deflate did not finish");
    out.resize(zs.total_out);
    return out;
}

// ---------------------------------------------------------------------------
// Files

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

/// Decoded image: header, scaled voxel values and the chosen affine.
struct Image {
    Header header;
    Grid3<double> values;
    Mat4 affine = identity_affine();

    Volume to_volume() const {
        Grid3<float> data(values.shape());
        for (std::size_t i = 0; i < values.size(); ++i) data[i] = static_cast<float>(values[i]);
        return Volume(std::move(data), affine);
    }

    /// Requires non-negative integral values.
    LabelVolume to_labels() const {
        Grid3<Label> data(values.shape());
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double v = values[i];
            if (!(v >= 0.0) || std::floor(v) != v || v > std::numeric_limits<Label>::max())
                fail(ErrorCode::BadLabel, "label image holds a non-integral or negative value");
            data[i] = static_cast<Label>(v);
        }
        return LabelVolume(std::move(data));
    }
};

namespace detail {

inline double decode_value(const std::uint8_t* p, Datatype t, bool swap) {
    auto get = [&](auto tag) {
        using T = decltype(tag);
        std::array<std::uint8_t, sizeof(T)> raw{};
        std::memcpy(raw.data(), p, sizeof(T));
        if (swap) std::reverse(raw.begin(), raw.end());
        T v;
        std::memcpy(&v, raw.data(), sizeof(T));
        return static_cast<double>(v);
    };
    switch (t) {
    case Datatype::UInt8: return get(std::uint8_t{});
    case Datatype::Int16: return get(std::int16_t{});
    case Datatype::Int32: return get(std::int32_t{});
    case Datatype::Float32: return get(float{});
    case Datatype::Float64: return get(double{});
    case Datatype::UInt16: return get(std::uint16_t{});
    }
    return 0.0;
}

inline Image decode(const Header& h, std::span<const std::uint8_t> data_bytes, std::size_t offset) {
    if (h.dim[0] != 3)
        fail(ErrorCode::UnsupportedDimensionality, "dim[0] = " + std::to_string(h.dim[0]) + ", only 3D volumes are supported");
    for (int i = 1; i <= 3; ++i)
        if (h.dim[i] < 1) fail(ErrorCode::BadShape, "dim[" + std::to_string(i) + "] = " + std::to_string(h.dim[i]));
    const auto dt = datatype_from_code(h.datatype);
    if (!dt) fail(ErrorCode::UnsupportedDatatype, "datatype code " + std::to_string(h.datatype));
    const Shape shape{static_cast<std::size_t>(h.dim[1]), static_cast<std::size_t>(h.dim[2]),
                      static_cast<std::size_t>(h.dim[3])};
    const std::size_t bpv = bytes_per_voxel(*dt);
    const std::size_t n = voxel_count(shape);
    if (data_bytes.size() < offset || data_bytes.size() - offset < n * bpv)
        fail(ErrorCode::TruncatedFile, "expected " + std::to_string(n * bpv) + " data bytes at offset " +
                                           std::to_string(offset) + ", file has " + std::to_string(data_bytes.size()));
    const bool swap = h.big_endian != (std::endian::native == std::endian::big);
    const bool scaled = h.scl_slope != 0.0f && std::isfinite(h.scl_slope) && std::isfinite(h.scl_inter);
    Image img;
    img.header = h;
    img.values = Grid3<double>(shape);
    const std::uint8_t* base = data_bytes.data() + offset;
    for (std::size_t i = 0; i < n; ++i) {
        double v = decode_value(base + i * bpv, *dt, swap);
        if (scaled) v = v * h.scl_slope + h.scl_inter;
        img.values[i] = v;
    }
    img.affine = header_affine(h);
    return img;
}

inline std::size_t data_offset(const Header& h) {
    if (!std::isfinite(h.vox_offset) || h.vox_offset < 0.0f) fail(ErrorCode::BadSize, "invalid vox_offset");
    const auto off = static_cast<std::size_t>(h.vox_offset);
    if (h.single_file() && off < header_size) fail(ErrorCode::BadSize, "vox_offset inside the header");
    return off;
}

} // namespace detail

/// Decodes an in-memory single-file NIfTI-1 image (plain or gzip).
inline Image decode_nifti(std::span<const std::uint8_t> file_bytes) {
    std::vector<std::uint8_t> inflated;
    if (is_gzip(file_bytes)) {
        inflated = gunzip(file_bytes);
        file_bytes = inflated;
    }
    if (file_bytes.size() < header_size)
        fail(ErrorCode::TruncatedFile, "file shorter than the 348-byte header");
    const Header h = parse_header(file_bytes.first(header_size));
    if (!h.single_file()) fail(ErrorCode::BadMagic, "\"ni1\" header needs its separate .img file");
    return detail::decode(h, file_bytes, detail::data_offset(h));
}

inline std::filesystem::path companion_image_path(const std::filesystem::path& hdr) {
    std::string s = hdr.string();
    for (const char* ext : {".hdr.gz", ".hdr"}) {
        const std::string e(ext);
        if (s.size() >= e.size() && s.compare(s.size() - e.size(), e.size(), e) == 0) {
            std::string base = s.substr(0, s.size() - e.size());
            for (const char* img : {".img", ".img.gz"})
                if (std::filesystem::exists(base + img)) return base + img;
            return base + ".img";
        }
    }
    return s + ".img";
}

inline Image read_nifti(const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes = read_file(path);
    if (is_gzip(bytes)) bytes = gunzip(bytes);
    if (bytes.size() < header_size) fail(ErrorCode::TruncatedFile, path.string() + " is shorter than 348 bytes");
    const Header h = parse_header(std::span<const std::uint8_t>(bytes).first(header_size));
    if (h.single_file()) return detail::decode(h, bytes, detail::data_offset(h));
    std::vector<std::uint8_t> img = read_file(companion_image_path(path));
    if (is_gzip(img)) img = gunzip(img);
    return detail::decode(h, img, detail::data_offset(h));
}

// ---------------------------------------------------------------------------
// Writing

struct WriteOptions {
    Datatype datatype = Datatype::Float32;
    std::optional<bool> gzip;        // unset: by ".gz" extension
    bool allow_quantization = false; // permit float -> integer rounding
};

namespace detail {

inline Header make_header(const Shape& shape, const Mat4& affine, Datatype dt) {
    Header h;
    h.sizeof_hdr = 348;
    h.dim = {3, static_cast<std::int16_t>(shape[0]), static_cast<std::int16_t>(shape[1]),
             static_cast<std::int16_t>(shape[2]), 1, 1, 1, 1};
    h.datatype = static_cast<std::int16_t>(dt);
    h.bitpix = static_cast<std::int16_t>(8 * bytes_per_voxel(dt));
    Vec3 spacing{};
    for (int j = 0; j < 3; ++j)
        spacing[j] = std::sqrt(affine[0][j] * affine[0][j] + affine[1][j] * affine[1][j] + affine[2][j] * affine[2][j]);
    h.pixdim = {1.0f, static_cast<float>(spacing[0]), static_cast<float>(spacing[1]), static_cast<float>(spacing[2]),
                0.0f, 0.0f, 0.0f, 0.0f};
    h.vox_offset = static_cast<float>(single_file_offset);
    h.scl_slope = 1.0f;
    h.scl_inter = 0.0f;
    h.xyzt_units = 2; // mm
    h.qform_code = 0;
    h.sform_code = 1;
    for (int j = 0; j < 4; ++j) {
        h.srow_x[j] = static_cast<float>(affine[0][j]);
        h.srow_y[j] = static_cast<float>(affine[1][j]);
        h.srow_z[j] = static_cast<float>(affine[2][j]);
    }
    h.magic = {'n', '+', '1', '\0'};
    return h;
}

template <typename T>
void put_le(std::uint8_t* p, T v) {
    std::array<std::uint8_t, sizeof(T)> raw{};
    std::memcpy(raw.data(), &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
    std::memcpy(p, raw.data(), sizeof(T));
}

inline void encode_value(std::uint8_t* p, Datatype t, double v) {
    switch (t) {
    case Datatype::UInt8: *p = static_cast<std::uint8_t>(v); break;
    case Datatype::Int16: put_le(p, static_cast<std::int16_t>(v)); break;
    case Datatype::Int32: put_le(p, static_cast<std::int32_t>(v)); break;
    case Datatype::Float32: put_le(p, static_cast<float>(v)); break;
    case Datatype::Float64: put_le(p, v); break;
    case Datatype::UInt16: put_le(p, static_cast<std::uint16_t>(v)); break;
    }
}

template <typename T>
std::vector<std::uint8_t> encode(const Grid3<T>& values, const Mat4& affine, const WriteOptions& opt, bool source_is_integer) {
    for (std::size_t i = 0; i < 3; ++i)
        if (values.shape()[i] > 32767) fail(ErrorCode::BadShape, "NIfTI-1 dimensions are limited to 32767");
    const Datatype dt = opt.datatype;
    if (is_integer(dt)) {
        if (!source_is_integer && !opt.allow_quantization)
            fail(ErrorCode::LossyDatatype, "writing float data as an integer type needs explicit quantization opt-in");
        const auto [lo, hi] = integer_limits(dt);
        if (!opt.allow_quantization)
            for (const T& v : values)
                if (static_cast<double>(v) < lo || static_cast<double>(v) > hi)
                    fail(ErrorCode::LossyDatatype, "value " + std::to_string(static_cast<double>(v)) +
                                                       " does not fit the requested integer type");
    } else if (source_is_integer && dt == Datatype::Float32) {
        for (const T& v : values)
            if (std::abs(static_cast<double>(v)) > 16777216.0)
                fail(ErrorCode::LossyDatatype, "integer value exceeds float32 exact range");
    }
    const Header h = make_header(values.shape(), affine, dt);
    const auto header_bytes = serialize_header(h);
    const std::size_t bpv = bytes_per_voxel(dt);
    std::vector<std::uint8_t> out(single_file_offset + values.size() * bpv, 0);
    std::copy(header_bytes.begin(), header_bytes.end(), out.begin());
    const auto [lo, hi] = integer_limits(dt);
    for (std::size_t i = 0; i < values.size(); ++i) {
        double v = static_cast<double>(values[i]);
        if (is_integer(dt)) v = std::clamp(std::round(v), lo, hi);
        encode_value(out.data() + single_file_offset + i * bpv, dt, v);
    }
    return out;
}

inline bool wants_gzip(const std::filesystem::path& path, const WriteOptions& opt) {
    if (opt.gzip) return *opt.gzip;
    return path.extension() == ".gz";
}

} // namespace detail

/// Single-file (n+1) encoding: vox_offset 352, slope 1, inter 0, sform from the affine.
inline std::vector<std::uint8_t> encode_nifti(const Volume& v, const WriteOptions& opt = {}) {
    return detail::encode(v.data(), v.affine(), opt, false);
}

inline std::vector<std::uint8_t> encode_nifti(const LabelVolume& labels, const Mat4& affine, const WriteOptions& opt = {}) {
    return detail::encode(labels.data(), affine, opt, true);
}

inline void write_nifti(const Volume& v, const std::filesystem::path& path, const WriteOptions& opt = {}) {
    auto bytes = encode_nifti(v, opt);
    if (detail::wants_gzip(path, opt)) bytes = gzip(bytes);
    write_file(path, bytes);
}

inline void write_nifti(const LabelVolume& labels, const Mat4& affine, const std::filesystem::path& path,
                        const WriteOptions& opt = {}) {
    auto bytes = encode_nifti(labels, affine, opt);
    if (detail::wants_gzip(path, opt)) bytes = gzip(bytes);
    write_file(path, bytes);
}

} // namespace mriaug::nifti
