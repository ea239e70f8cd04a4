// Copyright (c) 2026 the mmtk authors
// SPDX-License-Identifier: Apache-2.0

#include "mmtk/formats_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "mmtk/raster.hpp"

namespace mmtk {

namespace {

constexpr char kTensorMagic[4] = {'M', 'M', 'T', 'K'};
constexpr std::uint32_t kTensorVersion = 1;
constexpr float kFloMagic = 202021.25f; // spells "PIEH" in little-endian bytes

static_assert(std::endian::native == std::endian::little,
              "binary writers assume a little-endian host");

void append_bytes(std::vector<std::uint8_t>& out, const void* src, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(src);
    out.insert(out.end(), p, p + n);
}

template <typename T>
void append_scalar(std::vector<std::uint8_t>& out, T value) {
    append_bytes(out, &value, sizeof(T));
}

class ByteReader {
public:
    ByteReader(const std::vector<std::uint8_t>& bytes, std::string name)
        : bytes_(bytes), name_(std::move(name)) {}

    template <typename T>
    T read() {
        T value;
        read_into(&value, sizeof(T));
        return value;
    }

    void read_into(void* dst, std::size_t n) {
        if (pos_ + n > bytes_.size()) {
            throw FormatError(name_ + ": truncated at byte " + std::to_string(pos_));
        }
        std::memcpy(dst, bytes_.data() + pos_, n);
        pos_ += n;
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::string name_;
    std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open file: " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw FormatError("cannot open file for writing: " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw FormatError("short write: " + path.string());
    }
}

double parse_double_field(const std::string& token, const std::string& context) {
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto result = std::from_chars(first, last, value);
    if (result.ec != std::errc() || result.ptr != last) {
        throw ParseError(context + ": cannot parse number '" + token + "'");
    }
    return value;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream iss(line);
    std::string tok;
    while (iss >> tok) {
        tokens.push_back(tok);
    }
    return tokens;
}

// Collects non-empty, non-comment lines with their 1-based numbers.
std::vector<std::pair<int, std::string>> data_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open file: " + path.string());
    }
    std::vector<std::pair<int, std::string>> lines;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') {
            continue;
        }
        lines.emplace_back(number, line);
    }
    return lines;
}

// Netpbm header token reader: skips whitespace and '#' comments.
std::string next_pnm_token(ByteReader& reader) {
    std::string token;
    char c = 0;
    for (;;) {
        c = static_cast<char>(reader.read<std::uint8_t>());
        if (c == '#') {
            while (c != '\n') {
                c = static_cast<char>(reader.read<std::uint8_t>());
            }
            continue;
        }
        if (!std::isspace(static_cast<unsigned char>(c))) {
            break;
        }
    }
    for (;;) {
        token.push_back(c);
        if (reader.remaining() == 0) {
            return token;
        }
        c = static_cast<char>(reader.read<std::uint8_t>());
        if (std::isspace(static_cast<unsigned char>(c))) {
            return token; // consumed the single separator after the token
        }
    }
}

int parse_pnm_int(ByteReader& reader, const std::string& context) {
    const std::string token = next_pnm_token(reader);
    int value = 0;
    const auto result = std::from_chars(token.data(), token.data() + token.size(), value);
    if (result.ec != std::errc() || result.ptr != token.data() + token.size()) {
        throw FormatError(context + ": bad header token '" + token + "'");
    }
    return value;
}

} // namespace

// --- Tensor container ---

std::size_t dtype_size(TensorDType dtype) {
    switch (dtype) {
        case TensorDType::F32: return 4;
        case TensorDType::F64: return 8;
        case TensorDType::U8: return 1;
    }
    throw FormatError("unknown tensor dtype tag");
}

std::uint64_t TensorEntry::element_count() const {
    std::uint64_t count = 1;
    for (std::uint64_t d : dims) {
        count *= d;
    }
    return count;
}

std::vector<float> TensorEntry::as_f32() const {
    if (dtype != TensorDType::F32) {
        throw FormatError("tensor entry is not f32");
    }
    std::vector<float> values(element_count());
    std::memcpy(values.data(), payload.data(), payload.size());
    return values;
}

std::vector<double> TensorEntry::as_f64() const {
    if (dtype != TensorDType::F64) {
        throw FormatError("tensor entry is not f64");
    }
    std::vector<double> values(element_count());
    std::memcpy(values.data(), payload.data(), payload.size());
    return values;
}

const std::vector<std::uint8_t>& TensorEntry::as_u8() const {
    if (dtype != TensorDType::U8) {
        throw FormatError("tensor entry is not u8");
    }
    return payload;
}

namespace {

void add_entry(TensorContainer& container, const std::string& name, TensorDType dtype,
               std::vector<std::uint64_t> dims, std::vector<std::uint8_t> payload) {
    if (container.contains(name)) {
        throw FormatError("tensor container: duplicate entry name '" + name + "'");
    }
    TensorEntry entry;
    entry.dtype = dtype;
    entry.dims = std::move(dims);
    entry.payload = std::move(payload);
    if (entry.payload.size() != entry.element_count() * dtype_size(dtype)) {
        throw FormatError("tensor container: payload size does not match dims for '" + name + "'");
    }
    container.entries.emplace_back(name, std::move(entry));
}

} // namespace

void TensorContainer::add_f32(const std::string& name, std::vector<std::uint64_t> dims,
                              const std::vector<float>& values) {
    std::vector<std::uint8_t> payload(values.size() * 4);
    std::memcpy(payload.data(), values.data(), payload.size());
    add_entry(*this, name, TensorDType::F32, std::move(dims), std::move(payload));
}

void TensorContainer::add_f64(const std::string& name, std::vector<std::uint64_t> dims,
                              const std::vector<double>& values) {
    std::vector<std::uint8_t> payload(values.size() * 8);
    std::memcpy(payload.data(), values.data(), payload.size());
    add_entry(*this, name, TensorDType::F64, std::move(dims), std::move(payload));
}

void TensorContainer::add_u8(const std::string& name, std::vector<std::uint64_t> dims,
                             std::vector<std::uint8_t> bytes) {
    add_entry(*this, name, TensorDType::U8, std::move(dims), std::move(bytes));
}

bool TensorContainer::contains(const std::string& name) const {
    return std::any_of(entries.begin(), entries.end(),
                       [&](const auto& e) { return e.first == name; });
}

const TensorEntry& TensorContainer::at(const std::string& name) const {
    for (const auto& [entry_name, entry] : entries) {
        if (entry_name == name) {
            return entry;
        }
    }
    throw FormatError("tensor container: no entry named '" + name + "'");
}

void write_tensor(const TensorContainer& container, const std::filesystem::path& path) {
    std::set<std::string> names;
    for (const auto& [name, entry] : container.entries) {
        if (!names.insert(name).second) {
            throw FormatError("tensor container: duplicate entry name '" + name + "'");
        }
        (void)entry;
    }

    std::vector<std::uint8_t> bytes;
    append_bytes(bytes, kTensorMagic, 4);
    append_scalar<std::uint32_t>(bytes, kTensorVersion);
    append_scalar<std::uint32_t>(bytes, static_cast<std::uint32_t>(container.entries.size()));
    for (const auto& [name, entry] : container.entries) {
        append_scalar<std::uint32_t>(bytes, static_cast<std::uint32_t>(name.size()));
        append_bytes(bytes, name.data(), name.size());
        append_scalar<std::uint8_t>(bytes, static_cast<std::uint8_t>(entry.dtype));
        append_scalar<std::uint32_t>(bytes, static_cast<std::uint32_t>(entry.dims.size()));
        for (std::uint64_t d : entry.dims) {
            append_scalar<std::uint64_t>(bytes, d);
        }
        append_bytes(bytes, entry.payload.data(), entry.payload.size());
    }
    write_file_bytes(path, bytes);
}

TensorContainer read_tensor(const std::filesystem::path& path) {
    const std::vector<std::uint8_t> bytes = read_file_bytes(path);
    ByteReader reader(bytes, path.string());

    char magic[4];
    reader.read_into(magic, 4);
    if (std::memcmp(magic, kTensorMagic, 4) != 0) {
        throw FormatError(path.string() + ": bad magic, not a tensor container");
    }
    const auto version = reader.read<std::uint32_t>();
    if (version != kTensorVersion) {
        throw FormatError(path.string() + ": unsupported container version " +
                          std::to_string(version));
    }
    const auto entry_count = reader.read<std::uint32_t>();

    TensorContainer container;
    std::set<std::string> names;
    for (std::uint32_t i = 0; i < entry_count; ++i) {
        const auto name_len = reader.read<std::uint32_t>();
        std::string name(name_len, '\0');
        reader.read_into(name.data(), name_len);
        if (!names.insert(name).second) {
            throw FormatError(path.string() + ": duplicate entry name '" + name + "'");
        }
        TensorEntry entry;
        const auto tag = reader.read<std::uint8_t>();
        if (tag > 2) {
            throw FormatError(path.string() + ": unknown dtype tag " + std::to_string(tag));
        }
        entry.dtype = static_cast<TensorDType>(tag);
        const auto ndim = reader.read<std::uint32_t>();
        entry.dims.resize(ndim);
        for (std::uint32_t d = 0; d < ndim; ++d) {
            entry.dims[d] = reader.read<std::uint64_t>();
        }
        const std::uint64_t payload_size = entry.element_count() * dtype_size(entry.dtype);
        entry.payload.resize(payload_size);
        reader.read_into(entry.payload.data(), payload_size);
        container.entries.emplace_back(std::move(name), std::move(entry));
    }
    if (reader.remaining() != 0) {
        throw FormatError(path.string() + ": trailing bytes after last entry");
    }
    return container;
}

// --- Trajectories ---

CameraTrajectory read_trajectory(const std::filesystem::path& trajectory_path,
                                 const std::filesystem::path& intrinsics_path) {
    const auto pose_lines = data_lines(trajectory_path);
    if (pose_lines.empty()) {
        throw ParseError(trajectory_path.string() + ": no poses found");
    }

    std::vector<CameraPose> poses;
    poses.reserve(pose_lines.size());
    for (const auto& [number, line] : pose_lines) {
        const std::string context = trajectory_path.string() + " line " + std::to_string(number);
        const auto tokens = split_ws(line);
        if (tokens.size() != 8) {
            throw ParseError(context + ": expected 8 fields (timestamp tx ty tz qx qy qz qw), got " +
                             std::to_string(tokens.size()));
        }
        double fields[8];
        for (int i = 0; i < 8; ++i) {
            fields[i] = parse_double_field(tokens[i], context);
        }
        try {
            poses.push_back(CameraPose::from_tum(fields[1], fields[2], fields[3], fields[4],
                                                 fields[5], fields[6], fields[7]));
        } catch (const std::invalid_argument& e) {
            throw ParseError(context + ": " + e.what());
        }
    }

    const auto intr_lines = data_lines(intrinsics_path);
    if (intr_lines.size() != 1 && intr_lines.size() != poses.size()) {
        throw ParseError(intrinsics_path.string() + ": expected 1 or " +
                         std::to_string(poses.size()) + " intrinsics lines, got " +
                         std::to_string(intr_lines.size()));
    }
    std::vector<Intrinsics> intrinsics;
    intrinsics.reserve(intr_lines.size());
    for (const auto& [number, line] : intr_lines) {
        const std::string context = intrinsics_path.string() + " line " + std::to_string(number);
        const auto tokens = split_ws(line);
        if (tokens.size() != 6) {
            throw ParseError(context + ": expected 6 fields (fx fy cx cy width height), got " +
                             std::to_string(tokens.size()));
        }
        Intrinsics k;
        k.fx = parse_double_field(tokens[0], context);
        k.fy = parse_double_field(tokens[1], context);
        k.cx = parse_double_field(tokens[2], context);
        k.cy = parse_double_field(tokens[3], context);
        k.width = static_cast<int>(parse_double_field(tokens[4], context));
        k.height = static_cast<int>(parse_double_field(tokens[5], context));
        try {
            k.validate();
        } catch (const std::invalid_argument& e) {
            throw ParseError(context + ": " + e.what());
        }
        intrinsics.push_back(k);
    }

    CameraTrajectory traj;
    traj.frames.reserve(poses.size());
    for (std::size_t i = 0; i < poses.size(); ++i) {
        traj.frames.push_back({poses[i], intrinsics.size() == 1 ? intrinsics[0] : intrinsics[i]});
    }
    return traj;
}

void write_trajectory(const CameraTrajectory& traj,
                      const std::filesystem::path& trajectory_path,
                      const std::filesystem::path& intrinsics_path) {
    std::ofstream pose_out(trajectory_path, std::ios::trunc);
    if (!pose_out) {
        throw FormatError("cannot open file for writing: " + trajectory_path.string());
    }
    pose_out << "# timestamp tx ty tz qx qy qz qw\n";
    char buf[320];
    for (std::size_t i = 0; i < traj.frames.size(); ++i) {
        const CameraPose& p = traj.frames[i].pose;
        // full precision so a read-back pose serializes to the same bytes
        std::snprintf(buf, sizeof(buf), "%zu %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n", i,
                      p.translation.x(), p.translation.y(), p.translation.z(), p.rotation.x(),
                      p.rotation.y(), p.rotation.z(), p.rotation.w());
        pose_out << buf;
    }

    std::ofstream intr_out(intrinsics_path, std::ios::trunc);
    if (!intr_out) {
        throw FormatError("cannot open file for writing: " + intrinsics_path.string());
    }
    intr_out << "# fx fy cx cy width height\n";
    for (const TrajectoryFrame& frame : traj.frames) {
        const Intrinsics& k = frame.intrinsics;
        std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %.9g %d %d\n", k.fx, k.fy, k.cx, k.cy,
                      k.width, k.height);
        intr_out << buf;
    }
}

// --- Depth ---

namespace {

DepthMap read_depth_pgm16(ByteReader& reader, const std::string& name, double scale) {
    const int width = parse_pnm_int(reader, name);
    const int height = parse_pnm_int(reader, name);
    const int maxval = parse_pnm_int(reader, name);
    if (width < 1 || height < 1) {
        throw FormatError(name + ": bad PGM dimensions");
    }
    if (maxval <= 255 || maxval > 65535) {
        throw FormatError(name + ": depth PGM must be 16-bit (maxval in 256..65535), got maxval " +
                          std::to_string(maxval));
    }
    DepthMap depth(width, height);
    for (std::size_t i = 0; i < depth.values.size(); ++i) {
        const auto hi = reader.read<std::uint8_t>();
        const auto lo = reader.read<std::uint8_t>();
        const std::uint16_t raw = static_cast<std::uint16_t>((hi << 8) | lo);
        depth.values[i] = static_cast<float>(raw * scale);
    }
    return depth;
}

DepthMap read_depth_pfm(ByteReader& reader, const std::string& name, double scale) {
    const int width = parse_pnm_int(reader, name);
    const int height = parse_pnm_int(reader, name);
    const std::string scale_token = next_pnm_token(reader);
    double header_scale = 0.0;
    try {
        header_scale = parse_double_field(scale_token, name);
    } catch (const ParseError& e) {
        throw FormatError(e.what());
    }
    if (header_scale == 0.0) {
        throw FormatError(name + ": PFM header scale must be nonzero");
    }
    if (width < 1 || height < 1) {
        throw FormatError(name + ": bad PFM dimensions");
    }
    const bool little_endian = header_scale < 0.0;

    // PFM stores rows bottom-to-top. Header scale magnitude is not applied;
    // only the caller's depth scale is.
    DepthMap depth(width, height);
    for (int row = height - 1; row >= 0; --row) {
        for (int x = 0; x < width; ++x) {
            std::uint8_t raw[4];
            reader.read_into(raw, 4);
            if (!little_endian) {
                std::swap(raw[0], raw[3]);
                std::swap(raw[1], raw[2]);
            }
            float value;
            std::memcpy(&value, raw, 4);
            depth.at(x, row) = static_cast<float>(value * scale);
        }
    }
    return depth;
}

} // namespace

DepthMap read_depth(const std::filesystem::path& path, double scale) {
    const std::vector<std::uint8_t> bytes = read_file_bytes(path);
    ByteReader reader(bytes, path.string());
    char magic[2];
    reader.read_into(magic, 2);
    if (magic[0] == 'P' && magic[1] == '5') {
        return read_depth_pgm16(reader, path.string(), scale);
    }
    if (magic[0] == 'P' && magic[1] == 'f') {
        return read_depth_pfm(reader, path.string(), scale);
    }
    if (magic[0] == 'P' && magic[1] == 'F') {
        throw FormatError(path.string() + ": color PFM is not a depth map (expected grayscale 'Pf')");
    }
    throw FormatError(path.string() + ": unsupported depth format (expected 16-bit PGM or PFM)");
}

void write_depth_pgm16(const DepthMap& depth, const std::filesystem::path& path, double scale) {
    if (!(scale > 0.0)) {
        throw std::invalid_argument("write_depth_pgm16: scale must be positive");
    }
    std::vector<std::uint8_t> bytes;
    char header[64];
    std::snprintf(header, sizeof(header), "P5\n%d %d\n65535\n", depth.width, depth.height);
    append_bytes(bytes, header, std::strlen(header));
    for (float value : depth.values) {
        long raw = 0;
        if (DepthMap::is_valid_depth(value)) {
            raw = std::clamp(std::lround(value / scale), 0L, 65535L);
        }
        bytes.push_back(static_cast<std::uint8_t>((raw >> 8) & 0xff));
        bytes.push_back(static_cast<std::uint8_t>(raw & 0xff));
    }
    write_file_bytes(path, bytes);
}

// --- .flo ---

void write_flo(const MotionField& field, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(12 + field.uv.size() * 4);
    append_scalar<float>(bytes, kFloMagic);
    append_scalar<std::int32_t>(bytes, field.width);
    append_scalar<std::int32_t>(bytes, field.height);
    for (int y = 0; y < field.height; ++y) {
        for (int x = 0; x < field.width; ++x) {
            const bool ok = field.is_valid(x, y);
            append_scalar<float>(bytes, ok ? field.u(x, y) : kFloInvalidValue);
            append_scalar<float>(bytes, ok ? field.v(x, y) : kFloInvalidValue);
        }
    }
    write_file_bytes(path, bytes);
}

MotionField read_flo(const std::filesystem::path& path) {
    const std::vector<std::uint8_t> bytes = read_file_bytes(path);
    ByteReader reader(bytes, path.string());
    const auto magic = reader.read<float>();
    if (magic != kFloMagic) {
        throw FormatError(path.string() + ": bad magic, not a .flo file");
    }
    const auto width = reader.read<std::int32_t>();
    const auto height = reader.read<std::int32_t>();
    if (width < 1 || height < 1) {
        throw FormatError(path.string() + ": bad .flo dimensions");
    }
    MotionField field(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const auto u = reader.read<float>();
            const auto v = reader.read<float>();
            const bool ok = std::abs(u) <= kFloInvalidThreshold &&
                            std::abs(v) <= kFloInvalidThreshold;
            field.set(x, y, u, v, ok);
        }
    }
    if (reader.remaining() != 0) {
        throw FormatError(path.string() + ": trailing bytes after flow data");
    }
    return field;
}

// --- Visualization ---

namespace {

Rgb hsv_to_rgb(double hue_deg, double sat, double val) {
    const double c = val * sat;
    const double hp = hue_deg / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) {
        r = c; g = x;
    } else if (hp < 2) {
        r = x; g = c;
    } else if (hp < 3) {
        g = c; b = x;
    } else if (hp < 4) {
        g = x; b = c;
    } else if (hp < 5) {
        r = x; b = c;
    } else {
        r = c; b = x;
    }
    const double m = val - c;
    auto to_byte = [](double f) {
        return static_cast<std::uint8_t>(std::lround(std::clamp(f, 0.0, 1.0) * 255.0));
    };
    return Rgb{to_byte(r + m), to_byte(g + m), to_byte(b + m)};
}

} // namespace

Image8 flow_to_color(const MotionField& field, double max_magnitude) {
    double max_mag = max_magnitude;
    if (!(max_mag > 0.0)) {
        max_mag = 0.0;
        for (int y = 0; y < field.height; ++y) {
            for (int x = 0; x < field.width; ++x) {
                if (field.is_valid(x, y)) {
                    max_mag = std::max(max_mag, std::hypot(static_cast<double>(field.u(x, y)),
                                                           static_cast<double>(field.v(x, y))));
                }
            }
        }
    }

    Image8 img(field.width, field.height);
    for (int y = 0; y < field.height; ++y) {
        for (int x = 0; x < field.width; ++x) {
            if (!field.is_valid(x, y)) {
                continue; // stays black
            }
            const double u = field.u(x, y);
            const double v = field.v(x, y);
            const double mag = std::hypot(u, v);
            double hue = std::atan2(v, u) * 180.0 / M_PI;
            if (hue < 0.0) {
                hue += 360.0;
            }
            const double sat = max_mag > 0.0 ? std::min(1.0, mag / max_mag) : 0.0;
            const Rgb rgb = hsv_to_rgb(hue, sat, 1.0);
            std::uint8_t* p = img.pixel(x, y);
            p[0] = rgb[0];
            p[1] = rgb[1];
            p[2] = rgb[2];
        }
    }
    return img;
}

Image8 flow_to_arrows(const MotionField& field, int stride, const Image8* underlay) {
    if (stride < 1) {
        throw std::invalid_argument("flow_to_arrows: stride must be >= 1");
    }
    Image8 img;
    if (underlay != nullptr) {
        if (underlay->width != field.width || underlay->height != field.height) {
            throw std::invalid_argument("flow_to_arrows: underlay size does not match field");
        }
        img = *underlay;
    } else {
        img = Image8(field.width, field.height);
    }

    const Rgb shaft{0, 255, 0};
    const Rgb source{255, 255, 255};
    for (int cy = stride / 2; cy < field.height; cy += stride) {
        for (int cx = stride / 2; cx < field.width; cx += stride) {
            if (!field.is_valid(cx, cy)) {
                continue;
            }
            const double u = field.u(cx, cy);
            const double v = field.v(cx, cy);
            const double len = std::hypot(u, v);
            if (len >= 0.5) {
                const double tx = cx + u;
                const double ty = cy + v;
                draw_segment(img, cx, cy, tx, ty, 1.0, shaft);
                const double angle = std::atan2(v, u);
                const double head = std::min(4.0, 0.5 + 0.3 * len);
                for (const double wing : {angle + 5.0 * M_PI / 6.0, angle - 5.0 * M_PI / 6.0}) {
                    draw_segment(img, tx, ty, tx + head * std::cos(wing),
                                 ty + head * std::sin(wing), 1.0, shaft);
                }
                draw_disc(img, tx, ty, 1.0, shaft);
            }
            draw_disc(img, cx, cy, 1.0, source);
        }
    }
    return img;
}

// --- PPM ---

Image8 read_ppm(const std::filesystem::path& path) {
    const std::vector<std::uint8_t> bytes = read_file_bytes(path);
    ByteReader reader(bytes, path.string());
    char magic[2];
    reader.read_into(magic, 2);
    if (magic[0] != 'P' || magic[1] != '6') {
        throw FormatError(path.string() + ": not a binary PPM (P6)");
    }
    const int width = parse_pnm_int(reader, path.string());
    const int height = parse_pnm_int(reader, path.string());
    const int maxval = parse_pnm_int(reader, path.string());
    if (width < 1 || height < 1) {
        throw FormatError(path.string() + ": bad PPM dimensions");
    }
    if (maxval != 255) {
        throw FormatError(path.string() + ": only maxval 255 PPM is supported");
    }
    Image8 img(width, height);
    reader.read_into(img.data.data(), img.data.size());
    return img;
}

void write_ppm(const Image8& image, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes;
    char header[64];
    std::snprintf(header, sizeof(header), "P6\n%d %d\n255\n", image.width, image.height);
    append_bytes(bytes, header, std::strlen(header));
    append_bytes(bytes, image.data.data(), image.data.size());
    write_file_bytes(path, bytes);
}

} // namespace mmtk
