// Binary dataset formats and the colored point export.
//
//   points  .bin    packed little-endian float32 quadruples (x, y, z, i)
//   labels  .label  packed little-endian uint32; semantic id = low 16 bits
//   export  .ply    ascii or binary_little_endian, xyz float32 + rgb uint8
//   mask    .mask   one uint8 per point, 1 = kept, 0 = outlier
//
// All formats are little-endian regardless of host.

#ifndef DMNR_IO_HPP
#define DMNR_IO_HPP

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dmnr/errors.hpp"
#include "dmnr/types.hpp"

namespace dmnr {

namespace detail {

inline std::uint32_t load_le_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) |
           (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void store_le_u32(std::uint32_t v, unsigned char* p) {
    p[0] = static_cast<unsigned char>(v & 0xFF);
    p[1] = static_cast<unsigned char>((v >> 8) & 0xFF);
    p[2] = static_cast<unsigned char>((v >> 16) & 0xFF);
    p[3] = static_cast<unsigned char>((v >> 24) & 0xFF);
}

inline float load_le_f32(const unsigned char* p) {
    const std::uint32_t bits = load_le_u32(p);
    float f;
    std::memcpy(&f, &bits, sizeof(f));
    return f;
}

inline void store_le_f32(float f, unsigned char* p) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof(bits));
    store_le_u32(bits, p);
}

inline std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    in.seekg(0, std::ios::end);
    const std::streamoff size = in.tellg();
    in.seekg(0, std::ios::beg);
    std::vector<unsigned char> buf(static_cast<std::size_t>(size));
    if (size > 0 &&
        !in.read(reinterpret_cast<char*>(buf.data()), size)) {
        throw IoError("failed to read '" + path + "'");
    }
    return buf;
}

inline void write_file(const std::string& path,
                       const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("failed to write '" + path + "'");
    }
}

}  // namespace detail

// Decode a point file. Trailing bytes and non-finite values are rejected,
// never dropped, so index alignment with label files stays intact.
// `intensity_scale` rescales intensities at load; datasets disagree on the
// stored intensity range and the dynamic threshold is sensitive to it.
inline PointCloud load_points(const std::string& path,
                              double intensity_scale = 1.0) {
    const std::vector<unsigned char> buf = detail::read_file(path);
    if (buf.size() % 16 != 0) {
        throw MalformedFileError(
            "'" + path + "': size " + std::to_string(buf.size()) +
            " is not a multiple of 16 bytes");
    }
    PointCloud cloud;
    cloud.points.resize(buf.size() / 16);
    for (std::size_t n = 0; n < cloud.points.size(); ++n) {
        const unsigned char* rec = buf.data() + n * 16;
        Point p;
        p.x = detail::load_le_f32(rec);
        p.y = detail::load_le_f32(rec + 4);
        p.z = detail::load_le_f32(rec + 8);
        p.intensity = detail::load_le_f32(rec + 12);
        if (!p.is_finite()) {
            throw NonFiniteError("'" + path + "': non-finite value at point " +
                                 std::to_string(n));
        }
        p.intensity *= intensity_scale;
        cloud.points[n] = p;
    }
    return cloud;
}

inline void write_points(const PointCloud& cloud, const std::string& path) {
    std::vector<unsigned char> buf(cloud.size() * 16);
    for (std::size_t n = 0; n < cloud.size(); ++n) {
        unsigned char* rec = buf.data() + n * 16;
        const Point& p = cloud.points[n];
        detail::store_le_f32(static_cast<float>(p.x), rec);
        detail::store_le_f32(static_cast<float>(p.y), rec + 4);
        detail::store_le_f32(static_cast<float>(p.z), rec + 8);
        detail::store_le_f32(static_cast<float>(p.intensity), rec + 12);
    }
    detail::write_file(path, buf);
}

// Decode a label file; the semantic class is the low 16 bits (the high bits
// carry instance ids in the source datasets). Length must match the frame.
inline std::vector<std::uint32_t> load_labels(const std::string& path,
                                              std::size_t expected_count) {
    const std::vector<unsigned char> buf = detail::read_file(path);
    if (buf.size() % 4 != 0) {
        throw MalformedFileError("'" + path + "': size " +
                                 std::to_string(buf.size()) +
                                 " is not a multiple of 4 bytes");
    }
    const std::size_t n = buf.size() / 4;
    if (n != expected_count) {
        throw LengthMismatchError(
            "'" + path + "': " + std::to_string(n) + " labels for " +
            std::to_string(expected_count) + " points");
    }
    std::vector<std::uint32_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        labels[i] = detail::load_le_u32(buf.data() + i * 4) & 0xFFFFu;
    }
    return labels;
}

inline void write_labels(const std::vector<std::uint32_t>& labels,
                         const std::string& path) {
    std::vector<unsigned char> buf(labels.size() * 4);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        detail::store_le_u32(labels[i], buf.data() + i * 4);
    }
    detail::write_file(path, buf);
}

inline void write_mask(const Partition& partition, const std::string& path) {
    std::vector<unsigned char> buf(partition.size());
    for (std::size_t n = 0; n < partition.size(); ++n) {
        buf[n] = partition.kept(n) ? 1 : 0;
    }
    detail::write_file(path, buf);
}

inline std::vector<bool> load_mask(const std::string& path,
                                   std::size_t expected_count) {
    const std::vector<unsigned char> buf = detail::read_file(path);
    if (buf.size() != expected_count) {
        throw LengthMismatchError("'" + path + "': " +
                                  std::to_string(buf.size()) + " mask bytes for " +
                                  std::to_string(expected_count) + " points");
    }
    std::vector<bool> kept(buf.size());
    for (std::size_t n = 0; n < buf.size(); ++n) kept[n] = buf[n] != 0;
    return kept;
}

enum class PlyFormat : std::uint8_t { Ascii, BinaryLittleEndian };

struct Rgb {
    unsigned char r, g, b;
};

namespace detail {

inline Rgb verdict_color(Verdict v) {
    return v == Verdict::Kept ? Rgb{0, 0, 255} : Rgb{255, 0, 0};
}

inline Rgb stage_color(StageTag tag) {
    switch (tag) {
        case StageTag::HeightRetained: return Rgb{0, 180, 255};
        case StageTag::DensityRetained: return Rgb{0, 0, 255};
        case StageTag::Rescued: return Rgb{0, 255, 0};
        case StageTag::DensityRejected: return Rgb{255, 0, 0};
    }
    return Rgb{0, 0, 0};
}

}  // namespace detail

// Colored polygon-file export: kept points blue, outliers red, or the
// four-color stage palette when `color_by_stage` is set.
inline void write_colored(const PointCloud& cloud, const Partition& partition,
                          const std::string& path,
                          PlyFormat format = PlyFormat::BinaryLittleEndian,
                          bool color_by_stage = false) {
    partition.check_covers(cloud.size());

    std::string header = "ply\n";
    header += format == PlyFormat::Ascii ? "format ascii 1.0\n"
                                         : "format binary_little_endian 1.0\n";
    header += "element vertex " + std::to_string(cloud.size()) + "\n";
    header +=
        "property float x\nproperty float y\nproperty float z\n"
        "property uchar red\nproperty uchar green\nproperty uchar blue\n"
        "end_header\n";

    std::vector<unsigned char> out(header.begin(), header.end());
    for (std::size_t n = 0; n < cloud.size(); ++n) {
        const Point& p = cloud.points[n];
        const Rgb c = color_by_stage ? detail::stage_color(partition.tags[n])
                                     : detail::verdict_color(partition.verdicts[n]);
        if (format == PlyFormat::Ascii) {
            char line[128];
            std::snprintf(line, sizeof(line), "%.9g %.9g %.9g %u %u %u\n",
                          static_cast<double>(static_cast<float>(p.x)),
                          static_cast<double>(static_cast<float>(p.y)),
                          static_cast<double>(static_cast<float>(p.z)),
                          static_cast<unsigned>(c.r), static_cast<unsigned>(c.g),
                          static_cast<unsigned>(c.b));
            out.insert(out.end(), line, line + std::strlen(line));
        } else {
            unsigned char rec[15];
            detail::store_le_f32(static_cast<float>(p.x), rec);
            detail::store_le_f32(static_cast<float>(p.y), rec + 4);
            detail::store_le_f32(static_cast<float>(p.z), rec + 8);
            rec[12] = c.r;
            rec[13] = c.g;
            rec[14] = c.b;
            out.insert(out.end(), rec, rec + 15);
        }
    }
    detail::write_file(path, out);
}

// Pair point and label files living in two directories by shared stem
// (points/<stem>.bin with labels/<stem>.label). Unpaired files on either
// side are an error, not a skip.
inline std::vector<std::pair<std::string, PointCloud>> load_dataset_frames(
    const std::string& points_dir, const std::string& labels_dir,
    double intensity_scale = 1.0) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(points_dir)) {
        throw IoError("'" + points_dir + "' is not a directory");
    }
    if (!fs::is_directory(labels_dir)) {
        throw IoError("'" + labels_dir + "' is not a directory");
    }
    std::vector<std::string> stems;
    for (const auto& entry : fs::directory_iterator(points_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".bin") {
            stems.push_back(entry.path().stem().string());
        }
    }
    std::sort(stems.begin(), stems.end());
    for (const auto& entry : fs::directory_iterator(labels_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".label") {
            const std::string stem = entry.path().stem().string();
            if (!std::binary_search(stems.begin(), stems.end(), stem)) {
                throw IoError("label file '" + entry.path().string() +
                              "' has no matching point file");
            }
        }
    }

    std::vector<std::pair<std::string, PointCloud>> frames;
    frames.reserve(stems.size());
    for (const std::string& stem : stems) {
        const std::string points_path =
            (fs::path(points_dir) / (stem + ".bin")).string();
        const std::string labels_path =
            (fs::path(labels_dir) / (stem + ".label")).string();
        if (!fs::exists(labels_path)) {
            throw IoError("point file '" + points_path +
                          "' has no matching label file");
        }
        try {
            PointCloud cloud = load_points(points_path, intensity_scale);
            cloud.labels = load_labels(labels_path, cloud.size());
            frames.emplace_back(stem, std::move(cloud));
        } catch (const Error& e) {
            throw FrameError(stem, e.what());
        }
    }
    return frames;
}

}  // namespace dmnr

#endif  // DMNR_IO_HPP
