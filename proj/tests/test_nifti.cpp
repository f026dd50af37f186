#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <random>

#include "mriaug/mriaug.hpp"
#include "oracles.hpp"

using namespace mriaug;
namespace fs = std::filesystem;

namespace {

const fs::path fixtures{MRIAUG_FIXTURE_DIR};

fs::path temp_path(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "mriaug_nifti_tests";
    fs::create_directories(dir);
    return dir / name;
}

template <typename T>
void put(std::vector<std::uint8_t>& b, std::size_t off, T v, bool big) {
    std::uint8_t raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    if (big) std::reverse(raw, raw + sizeof(T));
    std::memcpy(b.data() + off, raw, sizeof(T));
}

/// Minimal header assembled from the standard field offsets.
std::vector<std::uint8_t> reference_header(bool big) {
    std::vector<std::uint8_t> b(348, 0);
    put<std::int32_t>(b, 0, 348, big);
    const std::int16_t dim[8] = {3, 5, 6, 7, 1, 1, 1, 1};
    for (int i = 0; i < 8; ++i) put<std::int16_t>(b, 40 + 2 * i, dim[i], big);
    put<std::int16_t>(b, 70, 16, big);
    put<std::int16_t>(b, 72, 32, big);
    const float pixdim[8] = {1, 0.5f, 0.75f, 2.0f, 0, 0, 0, 0};
    for (int i = 0; i < 8; ++i) put<float>(b, 76 + 4 * i, pixdim[i], big);
    put<float>(b, 108, 352.0f, big);
    put<float>(b, 112, 2.0f, big);
    put<float>(b, 116, -1.0f, big);
    put<std::int16_t>(b, 252, 1, big);
    put<std::int16_t>(b, 254, 2, big);
    put<float>(b, 264, 1.0f, big);
    const float srow[12] = {0.5f, 0, 0, -10, 0, 0.75f, 0, -20, 0, 0, 2, -30};
    for (int i = 0; i < 12; ++i) put<float>(b, 280 + 4 * i, srow[i], big);
    std::memcpy(b.data() + 344, "n+1\0", 4);
    return b;
}

} // namespace

TEST(NiftiHeader, ParsesReferenceLayout) {
    const auto bytes = reference_header(false);
    const nifti::Header h = nifti::parse_header(bytes);
    EXPECT_EQ(h.sizeof_hdr, 348);
    EXPECT_EQ(h.dim[0], 3);
    EXPECT_EQ(h.dim[1], 5);
    EXPECT_EQ(h.dim[2], 6);
    EXPECT_EQ(h.dim[3], 7);
    EXPECT_EQ(h.datatype, 16);
    EXPECT_EQ(h.bitpix, 32);
    EXPECT_EQ(h.pixdim[2], 0.75f);
    EXPECT_EQ(h.vox_offset, 352.0f);
    EXPECT_EQ(h.scl_slope, 2.0f);
    EXPECT_EQ(h.scl_inter, -1.0f);
    EXPECT_EQ(h.qform_code, 1);
    EXPECT_EQ(h.sform_code, 2);
    EXPECT_EQ(h.quatern_d, 1.0f);
    EXPECT_EQ(h.srow_y[3], -20.0f);
    EXPECT_TRUE(h.single_file());
    EXPECT_FALSE(h.big_endian);
}

TEST(NiftiHeader, ByteSwappedParsesIdentically) {
    nifti::Header le = nifti::parse_header(reference_header(false));
    nifti::Header be = nifti::parse_header(reference_header(true));
    EXPECT_TRUE(be.big_endian);
    be.big_endian = false;
    EXPECT_EQ(nifti::serialize_header(le), nifti::serialize_header(be));
}

TEST(NiftiHeader, SerializeParseRoundtrip) {
    const auto bytes = reference_header(false);
    const auto again = nifti::serialize_header(nifti::parse_header(bytes));
    EXPECT_TRUE(std::equal(bytes.begin(), bytes.end(), again.begin()));
}

TEST(NiftiHeader, ShortBufferIsBadSize) {
    std::vector<std::uint8_t> b(100, 0);
    try {
        nifti::parse_header(b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BadSize);
    }
}

TEST(NiftiHeader, BadMagic) {
    auto b = reference_header(false);
    std::memcpy(b.data() + 344, "XXXX", 4);
    try {
        nifti::parse_header(b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BadMagic);
    }
}

TEST(NiftiHeader, Nifti2Rejected) {
    auto b = reference_header(false);
    put<std::int32_t>(b, 0, 540, false);
    try {
        nifti::parse_header(b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnsupportedVersion);
    }
}

TEST(NiftiHeader, FuzzNeverCrashes) {
    std::mt19937_64 gen(2024);
    const auto valid = reference_header(false);
    int parsed = 0;
    for (int i = 0; i < 2000; ++i) {
        std::vector<std::uint8_t> b = valid;
        if (i % 2 == 0) {
            for (auto& x : b) x = static_cast<std::uint8_t>(gen());
        } else {
            for (int k = 0; k < 8; ++k) b[gen() % b.size()] = static_cast<std::uint8_t>(gen());
        }
        try {
            const auto h = nifti::parse_header(b);
            (void)nifti::header_affine(h);
            ++parsed;
        } catch (const Error&) {
        }
    }
    EXPECT_GT(parsed, 0);
}

TEST(NiftiRead, GoldenFloat32) {
    const auto img = nifti::read_nifti(fixtures / "golden_f32.nii");
    const Volume v = img.to_volume();
    EXPECT_EQ(v.shape(), (Shape{4, 4, 4}));
    for (std::size_t i = 0; i < 64; ++i) EXPECT_EQ(v.data()[i], static_cast<float>(i));
    EXPECT_EQ(v.affine(), identity_affine());
}

TEST(NiftiRead, GzipIsTransparent) {
    const Volume a = nifti::read_nifti(fixtures / "golden_f32.nii").to_volume();
    const Volume b = nifti::read_nifti(fixtures / "golden_f32.nii.gz").to_volume();
    EXPECT_EQ(a.data(), b.data());
    EXPECT_EQ(a.affine(), b.affine());
}

TEST(NiftiRead, EveryDatatype) {
    for (const char* name : {"uint8", "int16", "int32", "float32", "float64", "uint16"}) {
        const Volume v = nifti::read_nifti(fixtures / (std::string("golden_") + name + ".nii")).to_volume();
        for (std::size_t i = 0; i < 64; ++i) EXPECT_EQ(v.data()[i], static_cast<float>(i)) << name;
    }
}

TEST(NiftiRead, BigEndianScaledQform) {
    const auto img = nifti::read_nifti(fixtures / "golden_be_int16.nii");
    EXPECT_TRUE(img.header.big_endian);
    EXPECT_EQ(img.values.shape(), (Shape{3, 4, 5}));
    for (std::size_t i = 0; i < 60; ++i) EXPECT_EQ(img.values[i], (static_cast<double>(i) - 30.0) * 0.5 + 1.0);
    // quaternion (0, 0, 1): 180 degrees about z; qfac -1 flips the third column
    Mat4 expected = identity_affine();
    expected[0][0] = -2.0;
    expected[1][1] = -3.0;
    expected[2][2] = -4.0;
    expected[0][3] = 10.0;
    expected[1][3] = 20.0;
    expected[2][3] = 30.0;
    EXPECT_EQ(img.affine, expected);
}

TEST(NiftiRead, HeaderImagePair) {
    const auto img = nifti::read_nifti(fixtures / "golden_pair.hdr");
    EXPECT_FALSE(img.header.single_file());
    EXPECT_EQ(img.values.shape(), (Shape{2, 3, 4}));
    for (std::size_t i = 0; i < 24; ++i) EXPECT_EQ(img.values[i], static_cast<double>(i));
    EXPECT_EQ(img.affine, diagonal_affine({2.0, 3.0, 4.0}));
    const LabelVolume labels = img.to_labels();
    EXPECT_EQ(labels.data()[23], 23);
}

TEST(NiftiRead, ErrorCases) {
    auto expect_code = [](const std::vector<std::uint8_t>& bytes, ErrorCode code) {
        try {
            nifti::decode_nifti(bytes);
            ADD_FAILURE() << "no error";
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), code) << e.what();
        }
    };
    const auto good = nifti::read_file(fixtures / "golden_f32.nii");

    auto magic = good;
    std::memcpy(magic.data() + 344, "XXXX", 4);
    expect_code(magic, ErrorCode::BadMagic);

    auto dtype = good;
    put<std::int16_t>(dtype, 70, 128, false); // RGB24
    expect_code(dtype, ErrorCode::UnsupportedDatatype);

    auto dims = good;
    put<std::int16_t>(dims, 40, 4, false);
    expect_code(dims, ErrorCode::UnsupportedDimensionality);

    expect_code(std::vector<std::uint8_t>(good.begin(), good.end() - 10), ErrorCode::TruncatedFile);
    expect_code(std::vector<std::uint8_t>(good.begin(), good.begin() + 200), ErrorCode::TruncatedFile);

    auto gz = nifti::read_file(fixtures / "golden_f32.nii.gz");
    gz.resize(gz.size() / 2);
    expect_code(gz, ErrorCode::GzipError);
    auto corrupt = nifti::read_file(fixtures / "golden_f32.nii.gz");
    for (std::size_t i = 12; i < corrupt.size(); ++i) corrupt[i] ^= 0x5A;
    expect_code(corrupt, ErrorCode::GzipError);
}

TEST(NiftiRead, MissingFileIsIoError) {
    try {
        nifti::read_nifti(temp_path("does_not_exist.nii"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IoError);
    }
}

TEST(NiftiWrite, GoldenFixtureRoundtripIsBitExact) {
    const auto original = nifti::read_file(fixtures / "golden_f32.nii");
    const Volume v = nifti::decode_nifti(original).to_volume();
    EXPECT_EQ(nifti::encode_nifti(v), original);
}

TEST(NiftiWrite, Float32RoundtripDataAndAffine) {
    Mat4 a = diagonal_affine({0.5, 1.25, 3.0});
    a[0][3] = -12.5;
    a[1][3] = 4.0;
    const Volume v(oracle::random_volume({7, 5, 3}, 8).data(), a);
    for (const char* name : {"rt.nii", "rt.nii.gz"}) {
        const fs::path p = temp_path(name);
        nifti::write_nifti(v, p);
        const Volume r = nifti::read_nifti(p).to_volume();
        EXPECT_EQ(r.data(), v.data());
        EXPECT_EQ(r.affine(), v.affine());
    }
}

TEST(NiftiWrite, GzipAndPlainParseIdentically) {
    const Volume v = oracle::random_volume({6, 6, 6}, 4);
    nifti::write_nifti(v, temp_path("same.nii"));
    nifti::write_nifti(v, temp_path("same.nii.gz"));
    EXPECT_NE(nifti::read_file(temp_path("same.nii")), nifti::read_file(temp_path("same.nii.gz")));
    EXPECT_EQ(nifti::read_nifti(temp_path("same.nii")).values, nifti::read_nifti(temp_path("same.nii.gz")).values);
}

TEST(NiftiWrite, GzipOutputIsDeterministic) {
    const Volume v = oracle::random_volume({6, 6, 6}, 4);
    nifti::write_nifti(v, temp_path("det1.nii.gz"));
    nifti::write_nifti(v, temp_path("det2.nii.gz"));
    EXPECT_EQ(nifti::read_file(temp_path("det1.nii.gz")), nifti::read_file(temp_path("det2.nii.gz")));
}

TEST(NiftiWrite, HeaderConventions) {
    const auto bytes = nifti::encode_nifti(oracle::random_volume({2, 3, 4}, 1));
    const auto h = nifti::parse_header(std::span<const std::uint8_t>(bytes).first(348));
    EXPECT_EQ(h.vox_offset, 352.0f);
    EXPECT_EQ(h.scl_slope, 1.0f);
    EXPECT_EQ(h.scl_inter, 0.0f);
    EXPECT_GT(h.sform_code, 0);
    EXPECT_EQ(bytes.size(), 352u + 24u * 4u);
}

TEST(NiftiWrite, IntegerLabelRoundtrips) {
    Grid3<Label> g({5, 4, 3});
    std::mt19937 gen(3);
    for (auto& v : g) v = static_cast<Label>(gen() % 256);
    const LabelVolume l(g);
    for (auto dt : {nifti::Datatype::UInt8, nifti::Datatype::Int16, nifti::Datatype::UInt16, nifti::Datatype::Int32,
                    nifti::Datatype::Float32, nifti::Datatype::Float64}) {
        nifti::WriteOptions opt;
        opt.datatype = dt;
        const fs::path p = temp_path("labels.nii.gz");
        nifti::write_nifti(l, identity_affine(), p, opt);
        const auto img = nifti::read_nifti(p);
        EXPECT_EQ(img.header.datatype, static_cast<std::int16_t>(dt));
        EXPECT_EQ(img.to_labels().data(), l.data());
    }
}

TEST(NiftiWrite, IntegerVolumesRoundtripWithOptIn) {
    Grid3<float> g({4, 4, 4});
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = static_cast<float>(i) - 20.0f;
    const Volume v(g);
    nifti::WriteOptions opt;
    opt.datatype = nifti::Datatype::Int16;
    opt.allow_quantization = true;
    nifti::write_nifti(v, temp_path("i16.nii"), opt);
    EXPECT_EQ(nifti::read_nifti(temp_path("i16.nii")).to_volume().data(), v.data());
}

TEST(NiftiWrite, FloatToIntWithoutOptInIsLossy) {
    nifti::WriteOptions opt;
    opt.datatype = nifti::Datatype::Int16;
    try {
        nifti::write_nifti(oracle::random_volume({3, 3, 3}, 2), temp_path("lossy.nii"), opt);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::LossyDatatype);
    }
    Grid3<Label> g({2, 2, 2});
    g[0] = 300;
    opt.datatype = nifti::Datatype::UInt8;
    try {
        nifti::write_nifti(LabelVolume(g), identity_affine(), temp_path("lossy_labels.nii"), opt);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::LossyDatatype);
    }
}

TEST(NiftiWrite, UnwritableDirectoryIsIoError) {
    try {
        nifti::write_nifti(oracle::random_volume({2, 2, 2}, 2), "/nonexistent_dir_for_mriaug/x.nii");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IoError);
    }
}
