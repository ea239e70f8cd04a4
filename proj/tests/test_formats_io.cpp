// Copyright (c) 2026 the mmtk authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <unistd.h>

#include "mmtk/formats_io.hpp"
#include "test_support.hpp"

using namespace mmtk;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static std::atomic<int> counter{0};
        path = fs::temp_directory_path() /
               ("mmtk_fmt_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::uint8_t> slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void append_le_float(std::vector<std::uint8_t>& bytes, float v) {
    std::uint8_t raw[4];
    std::memcpy(raw, &v, 4);
    bytes.insert(bytes.end(), raw, raw + 4);
}

MotionField random_field(std::mt19937& rng, int w, int h) {
    std::uniform_real_distribution<double> uni(-30.0, 30.0);
    MotionField field(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const bool valid = rng() % 4 != 0;
            field.set(x, y, static_cast<float>(uni(rng)), static_cast<float>(uni(rng)), valid);
        }
    }
    return field;
}

} // namespace

TEST_CASE("read_trajectory: two identity lines, zero relative motion") {
    TempDir dir;
    const fs::path traj = dir.path / "traj.txt";
    const fs::path intr = dir.path / "intr.txt";
    std::ofstream(traj) << "# comment\n"
                        << "0 0 0 0 0 0 0 1\n"
                        << "1 0 0 0 0 0 0 1\n";
    std::ofstream(intr) << "100 100 32 24 64 48\n";

    const CameraTrajectory out = read_trajectory(traj, intr);
    REQUIRE(out.size() == 2);
    CHECK(out.frames[0].intrinsics.fx == 100.0);
    CHECK(out.frames[1].intrinsics.width == 64); // single line broadcast to all frames
    const RigidTransform rel = relative_motion(out.frames[0].pose, out.frames[1].pose);
    CHECK(rel.matrix == Eigen::Matrix4d::Identity());
}

TEST_CASE("read_trajectory: missing field names the line") {
    TempDir dir;
    const fs::path traj = dir.path / "traj.txt";
    const fs::path intr = dir.path / "intr.txt";
    std::ofstream(traj) << "0 0 0 0 0 0 0 1\n"
                        << "1 0 0 0 0 0 0\n"; // 7 fields, qw missing
    std::ofstream(intr) << "100 100 32 24 64 48\n";
    CHECK_THROWS_WITH_AS(read_trajectory(traj, intr), doctest::Contains("line 2"), ParseError);
}

TEST_CASE("read_trajectory: empty and malformed inputs") {
    TempDir dir;
    const fs::path traj = dir.path / "traj.txt";
    const fs::path intr = dir.path / "intr.txt";
    std::ofstream(intr) << "100 100 32 24 64 48\n";

    std::ofstream(traj) << "# only comments\n";
    CHECK_THROWS_AS(read_trajectory(traj, intr), ParseError);

    std::ofstream(traj, std::ios::trunc) << "0 0 0 0 bad 0 0 1\n";
    CHECK_THROWS_AS(read_trajectory(traj, intr), ParseError);

    std::ofstream(traj, std::ios::trunc) << "0 0 0 0 0 0 0 0\n"; // zero-norm quaternion
    CHECK_THROWS_AS(read_trajectory(traj, intr), ParseError);

    std::ofstream(traj, std::ios::trunc) << "0 0 0 0 0 0 0 1\n0 0 0 0 0 0 0 1\n0 0 0 0 0 0 0 1\n";
    std::ofstream(intr, std::ios::trunc) << "100 100 32 24 64 48\n100 100 32 24 64 48\n";
    CHECK_THROWS_WITH_AS(read_trajectory(traj, intr), doctest::Contains("expected 1 or 3"),
                         ParseError);
}

TEST_CASE("trajectory round trip preserves 9 significant digits") {
    std::mt19937 rng(601);
    CameraTrajectory traj;
    for (int i = 0; i < 5; ++i) {
        TrajectoryFrame frame;
        frame.pose = mmtk_test::random_pose(rng);
        frame.intrinsics = mmtk_test::random_intrinsics(rng, 40, 30);
        traj.frames.push_back(frame);
    }

    TempDir dir;
    const fs::path traj_path = dir.path / "traj.txt";
    const fs::path intr_path = dir.path / "intr.txt";
    write_trajectory(traj, traj_path, intr_path);
    const CameraTrajectory back = read_trajectory(traj_path, intr_path);

    REQUIRE(back.size() == traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto& a = traj.frames[i];
        const auto& b = back.frames[i];
        CHECK((a.pose.translation - b.pose.translation).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(std::abs(a.pose.rotation.x() - b.pose.rotation.x()) < 1e-8);
        CHECK(std::abs(a.pose.rotation.w() - b.pose.rotation.w()) < 1e-8);
        CHECK(a.intrinsics.fx == doctest::Approx(b.intrinsics.fx).epsilon(1e-8));
        CHECK(a.intrinsics.width == b.intrinsics.width);
    }
}

TEST_CASE("read_depth PGM16") {
    TempDir dir;
    const fs::path path = dir.path / "depth.pgm";

    SUBCASE("all-zero raster is all invalid") {
        write_depth_pgm16(DepthMap(4, 3, 0.0f), path, 0.001);
        const DepthMap depth = read_depth(path, 0.001);
        CHECK(depth.width == 4);
        CHECK(depth.height == 3);
        for (float v : depth.values) {
            CHECK(!DepthMap::is_valid_depth(v));
        }
    }
    SUBCASE("raw 1000 at scale 0.001 reads as 1.0") {
        std::vector<std::uint8_t> bytes;
        const char* header = "P5\n2 1\n65535\n";
        bytes.insert(bytes.end(), header, header + std::strlen(header));
        bytes.push_back(1000 >> 8);
        bytes.push_back(1000 & 0xff);
        bytes.push_back(0);
        bytes.push_back(0);
        write_bytes(path, bytes);
        const DepthMap depth = read_depth(path, 0.001);
        CHECK(depth.at(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(!DepthMap::is_valid_depth(depth.at(1, 0)));
    }
    SUBCASE("8-bit PGM is rejected") {
        const char* header = "P5\n2 1\n255\n";
        std::vector<std::uint8_t> bytes(header, header + std::strlen(header));
        bytes.push_back(10);
        bytes.push_back(20);
        write_bytes(path, bytes);
        CHECK_THROWS_AS(read_depth(path, 1.0), FormatError);
    }
}

TEST_CASE("read_depth PFM") {
    TempDir dir;
    const fs::path path = dir.path / "depth.pfm";

    SUBCASE("negative header scale means little-endian payload") {
        std::vector<std::uint8_t> bytes;
        const char* header = "Pf\n2 2\n-1.0\n";
        bytes.insert(bytes.end(), header, header + std::strlen(header));
        // bottom row first: (y=1) then (y=0)
        append_le_float(bytes, 3.0f);
        append_le_float(bytes, 4.0f);
        append_le_float(bytes, 1.0f);
        append_le_float(bytes, 2.0f);
        write_bytes(path, bytes);

        const DepthMap depth = read_depth(path, 2.0);
        CHECK(depth.at(0, 0) == doctest::Approx(2.0));
        CHECK(depth.at(1, 0) == doctest::Approx(4.0));
        CHECK(depth.at(0, 1) == doctest::Approx(6.0));
        CHECK(depth.at(1, 1) == doctest::Approx(8.0));
    }
    SUBCASE("positive header scale means big-endian payload") {
        std::vector<std::uint8_t> bytes;
        const char* header = "Pf\n1 1\n1.0\n";
        bytes.insert(bytes.end(), header, header + std::strlen(header));
        float v = 5.0f;
        std::uint8_t raw[4];
        std::memcpy(raw, &v, 4);
        std::swap(raw[0], raw[3]);
        std::swap(raw[1], raw[2]);
        bytes.insert(bytes.end(), raw, raw + 4);
        write_bytes(path, bytes);
        const DepthMap depth = read_depth(path, 1.0);
        CHECK(depth.at(0, 0) == 5.0f);
    }
    SUBCASE("color PFM and unknown magics are rejected") {
        write_bytes(path, {'P', 'F', '\n'});
        CHECK_THROWS_AS(read_depth(path, 1.0), FormatError);
        write_bytes(path, {'X', 'Y', 'Z'});
        CHECK_THROWS_AS(read_depth(path, 1.0), FormatError);
    }
}

TEST_CASE(".flo zero field round-trips bit exactly") {
    TempDir dir;
    const fs::path path = dir.path / "zero.flo";
    MotionField field(5, 4);
    for (std::size_t i = 0; i < field.valid.size(); ++i) {
        field.valid[i] = 1;
    }
    write_flo(field, path);
    const MotionField back = read_flo(path);
    CHECK(back.width == 5);
    CHECK(back.height == 4);
    CHECK(back.uv == field.uv);
    CHECK(back.valid == field.valid);

    // writing again reproduces the identical byte stream
    const fs::path path2 = dir.path / "zero2.flo";
    write_flo(back, path2);
    CHECK(slurp(path) == slurp(path2));
}

TEST_CASE(".flo rejects a bad magic") {
    TempDir dir;
    const fs::path path = dir.path / "bad.flo";
    write_bytes(path, {0x00, 0x01, 0x02, 0x03, 2, 0, 0, 0, 1, 0, 0, 0});
    CHECK_THROWS_AS(read_flo(path), FormatError);
}

TEST_CASE(".flo 2x1 field has the documented 28-byte layout") {
    TempDir dir;
    const fs::path path = dir.path / "two.flo";
    MotionField field(2, 1);
    field.set(0, 0, 1.0f, 2.0f, true);
    field.set(1, 0, 3.0f, 4.0f, true);
    write_flo(field, path);

    // magic "PIEH", width 2, height 1, then (1, 2), (3, 4) as f32 LE
    std::vector<std::uint8_t> expected = {'P', 'I', 'E', 'H', 2, 0, 0, 0, 1, 0, 0, 0};
    append_le_float(expected, 1.0f);
    append_le_float(expected, 2.0f);
    append_le_float(expected, 3.0f);
    append_le_float(expected, 4.0f);
    REQUIRE(expected.size() == 28);
    CHECK(slurp(path) == expected);
}

TEST_CASE(".flo random fields round trip (sentinel-coded invalid pixels)") {
    std::mt19937 rng(607);
    TempDir dir;
    for (int trial = 0; trial < 25; ++trial) {
        const MotionField field = random_field(rng, 1 + static_cast<int>(rng() % 16),
                                               1 + static_cast<int>(rng() % 16));
        const fs::path path = dir.path / "f.flo";
        write_flo(field, path);
        const MotionField back = read_flo(path);
        REQUIRE(back.valid == field.valid);
        for (int y = 0; y < field.height; ++y) {
            for (int x = 0; x < field.width; ++x) {
                if (field.is_valid(x, y)) {
                    CHECK(back.u(x, y) == field.u(x, y));
                    CHECK(back.v(x, y) == field.v(x, y));
                }
            }
        }
        // file-level idempotence
        const fs::path path2 = dir.path / "g.flo";
        write_flo(back, path2);
        CHECK(slurp(path) == slurp(path2));
    }
}

TEST_CASE(".flo truncation is detected") {
    TempDir dir;
    const fs::path path = dir.path / "t.flo";
    MotionField field(4, 4);
    write_flo(field, path);
    std::vector<std::uint8_t> bytes = slurp(path);
    bytes.resize(bytes.size() - 5);
    write_bytes(path, bytes);
    CHECK_THROWS_AS(read_flo(path), FormatError);
}

TEST_CASE("flow_to_color conventions") {
    SUBCASE("zero field renders white, invalid pixels black") {
        MotionField field(4, 2);
        for (int x = 0; x < 4; ++x) {
            field.set(x, 0, 0.0f, 0.0f, true);
            field.set(x, 1, 0.0f, 0.0f, false);
        }
        const Image8 img = flow_to_color(field);
        for (int x = 0; x < 4; ++x) {
            const std::uint8_t* top = img.pixel(x, 0);
            CHECK(top[0] == 255);
            CHECK(top[1] == 255);
            CHECK(top[2] == 255);
            const std::uint8_t* bottom = img.pixel(x, 1);
            CHECK(bottom[0] == 0);
            CHECK(bottom[1] == 0);
            CHECK(bottom[2] == 0);
        }
    }
    SUBCASE("uniform rightward field is a single fully saturated hue") {
        MotionField field(5, 5);
        for (int y = 0; y < 5; ++y) {
            for (int x = 0; x < 5; ++x) {
                field.set(x, y, 2.0f, 0.0f, true);
            }
        }
        const Image8 img = flow_to_color(field);
        const std::uint8_t* first = img.pixel(0, 0);
        CHECK(first[0] == 255); // hue 0 at full saturation = pure red
        CHECK(first[1] == 0);
        CHECK(first[2] == 0);
        for (int y = 0; y < 5; ++y) {
            for (int x = 0; x < 5; ++x) {
                CHECK(std::equal(first, first + 3, img.pixel(x, y)));
            }
        }
    }
    SUBCASE("hue sweeps the full wheel on a rotational field") {
        // one pixel per angle sample, all magnitude 1
        const int n = 12;
        MotionField field(n, 1);
        for (int i = 0; i < n; ++i) {
            const double angle = 2.0 * M_PI * i / n;
            field.set(i, 0, static_cast<float>(std::cos(angle)),
                      static_cast<float>(std::sin(angle)), true);
        }
        const Image8 img = flow_to_color(field, 1.0);
        // adjacent samples must differ (hue advances) and the set must hit
        // widely separated hues: red-ish at 0, green-ish at 120, blue-ish at 240
        for (int i = 0; i + 1 < n; ++i) {
            CHECK(!std::equal(img.pixel(i, 0), img.pixel(i, 0) + 3, img.pixel(i + 1, 0)));
        }
        CHECK(img.pixel(0, 0)[0] == 255);
        CHECK(img.pixel(4, 0)[1] == 255); // 120 degrees
        CHECK(img.pixel(8, 0)[2] == 255); // 240 degrees
    }
}

TEST_CASE("flow_to_arrows geometry") {
    SUBCASE("zero field draws dots only") {
        MotionField field(32, 32);
        for (std::size_t i = 0; i < field.valid.size(); ++i) {
            field.valid[i] = 1;
        }
        const Image8 img = flow_to_arrows(field, 16);
        std::size_t white = 0, other = 0;
        for (int y = 0; y < 32; ++y) {
            for (int x = 0; x < 32; ++x) {
                const std::uint8_t* p = img.pixel(x, y);
                if (p[0] == 255 && p[1] == 255 && p[2] == 255) {
                    ++white;
                } else if (p[0] || p[1] || p[2]) {
                    ++other;
                }
            }
        }
        CHECK(white > 0);
        CHECK(other == 0); // no shafts, no arrowheads
    }
    SUBCASE("arrow tips land exactly at source + displacement") {
        MotionField field(64, 64);
        for (int y = 0; y < 64; ++y) {
            for (int x = 0; x < 64; ++x) {
                field.set(x, y, 10.0f, 6.0f, true);
            }
        }
        const Image8 img = flow_to_arrows(field, 32);
        for (int cy = 16; cy < 64; cy += 32) {
            for (int cx = 16; cx < 64; cx += 32) {
                const std::uint8_t* tip = img.pixel(cx + 10, cy + 6);
                CHECK(tip[1] == 255); // green target marker
                const std::uint8_t* src = img.pixel(cx, cy);
                CHECK(src[0] == 255); // white source dot
                CHECK(src[1] == 255);
                CHECK(src[2] == 255);
            }
        }
    }
    SUBCASE("underlay must match the field size") {
        MotionField field(8, 8);
        const Image8 underlay(4, 4);
        CHECK_THROWS_AS(flow_to_arrows(field, 2, &underlay), std::invalid_argument);
    }
}

TEST_CASE("tensor container: empty round trip") {
    TempDir dir;
    const fs::path path = dir.path / "empty.mmtk";
    write_tensor(TensorContainer{}, path);
    const TensorContainer back = read_tensor(path);
    CHECK(back.entries.empty());
    CHECK(slurp(path).size() == 12); // magic + version + count
}

TEST_CASE("tensor container: single f32 2x2 entry byte count") {
    TempDir dir;
    const fs::path path = dir.path / "one.mmtk";
    TensorContainer container;
    container.add_f32("a", {2, 2}, {1.0f, 2.0f, 3.0f, 4.0f});
    write_tensor(container, path);
    // 12 header + (4 name-len + 1 name + 1 dtype + 4 ndim + 16 dims + 16 payload)
    CHECK(slurp(path).size() == 54);

    const TensorContainer back = read_tensor(path);
    REQUIRE(back.entries.size() == 1);
    CHECK(back.at("a").dims == std::vector<std::uint64_t>{2, 2});
    CHECK(back.at("a").as_f32() == std::vector<float>{1.0f, 2.0f, 3.0f, 4.0f});
}

TEST_CASE("tensor container: duplicate names are rejected") {
    TensorContainer container;
    container.add_f32("x", {1}, {1.0f});
    CHECK_THROWS_AS(container.add_u8("x", {1}, {7}), FormatError);
}

TEST_CASE("tensor container: random mixed containers round trip bit exactly") {
    std::mt19937 rng(613);
    TempDir dir;
    for (int trial = 0; trial < 25; ++trial) {
        TensorContainer container;
        const int entry_count = static_cast<int>(rng() % 5);
        for (int e = 0; e < entry_count; ++e) {
            const std::string name = "entry_" + std::to_string(e);
            const std::uint64_t n = 1 + rng() % 16;
            switch (rng() % 3) {
                case 0: {
                    std::vector<float> v(n);
                    for (float& x : v) {
                        x = static_cast<float>(mmtk_test::uniform(rng, -10, 10));
                    }
                    container.add_f32(name, {n}, v);
                    break;
                }
                case 1: {
                    std::vector<double> v(n);
                    for (double& x : v) {
                        x = mmtk_test::uniform(rng, -10, 10);
                    }
                    container.add_f64(name, {n}, v);
                    break;
                }
                default: {
                    std::vector<std::uint8_t> v(n);
                    for (std::uint8_t& x : v) {
                        x = static_cast<std::uint8_t>(rng() % 256);
                    }
                    container.add_u8(name, {n}, std::move(v));
                    break;
                }
            }
        }
        const fs::path path = dir.path / "c.mmtk";
        write_tensor(container, path);
        const std::vector<std::uint8_t> bytes = slurp(path);
        const TensorContainer back = read_tensor(path);
        const fs::path path2 = dir.path / "c2.mmtk";
        write_tensor(back, path2);
        CHECK(slurp(path2) == bytes);
    }
}

TEST_CASE("tensor container: malformed files") {
    TempDir dir;
    const fs::path path = dir.path / "bad.mmtk";

    SUBCASE("bad magic") {
        write_bytes(path, {'N', 'O', 'P', 'E', 1, 0, 0, 0, 0, 0, 0, 0});
        CHECK_THROWS_AS(read_tensor(path), FormatError);
    }
    SUBCASE("truncated payload") {
        TensorContainer container;
        container.add_f64("big", {64}, std::vector<double>(64, 1.0));
        write_tensor(container, path);
        std::vector<std::uint8_t> bytes = slurp(path);
        bytes.resize(bytes.size() - 17);
        write_bytes(path, bytes);
        CHECK_THROWS_AS(read_tensor(path), FormatError);
    }
    SUBCASE("trailing bytes") {
        write_tensor(TensorContainer{}, path);
        std::vector<std::uint8_t> bytes = slurp(path);
        bytes.push_back(0);
        write_bytes(path, bytes);
        CHECK_THROWS_AS(read_tensor(path), FormatError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_tensor(dir.path / "absent.mmtk"), FormatError);
    }
}

TEST_CASE("ppm round trip and header handling") {
    std::mt19937 rng(617);
    TempDir dir;
    Image8 img(7, 5);
    for (std::uint8_t& b : img.data) {
        b = static_cast<std::uint8_t>(rng() % 256);
    }
    const fs::path path = dir.path / "img.ppm";
    write_ppm(img, path);
    const Image8 back = read_ppm(path);
    CHECK(back.width == 7);
    CHECK(back.height == 5);
    CHECK(back.data == img.data);

    SUBCASE("comments in the header are skipped") {
        std::vector<std::uint8_t> bytes;
        const char* header = "P6\n# a comment\n1 1\n255\n";
        bytes.insert(bytes.end(), header, header + std::strlen(header));
        bytes.insert(bytes.end(), {10, 20, 30});
        write_bytes(path, bytes);
        const Image8 tiny = read_ppm(path);
        CHECK(tiny.pixel(0, 0)[2] == 30);
    }
    SUBCASE("non-255 maxval is rejected") {
        std::vector<std::uint8_t> bytes;
        const char* header = "P6\n1 1\n65535\n";
        bytes.insert(bytes.end(), header, header + std::strlen(header));
        bytes.insert(bytes.end(), {0, 0, 0, 0, 0, 0});
        write_bytes(path, bytes);
        CHECK_THROWS_AS(read_ppm(path), FormatError);
    }
}
