#include "leafpick/cloud_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace leafpick {

namespace {

bool all_finite(const Vec3& p) {
    return std::isfinite(p.x()) && std::isfinite(p.y()) && std::isfinite(p.z());
}

float read_f32_le(const std::byte* p) {
    std::uint32_t u = static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(p[0])) |
                      static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(p[1])) << 8 |
                      static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(p[2])) << 16 |
                      static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(p[3])) << 24;
    float f;
    std::memcpy(&f, &u, 4);
    return f;
}

void append_f32_le(std::vector<std::byte>& out, float f) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    out.push_back(std::byte(u & 0xff));
    out.push_back(std::byte((u >> 8) & 0xff));
    out.push_back(std::byte((u >> 16) & 0xff));
    out.push_back(std::byte((u >> 24) & 0xff));
}

void append_str(std::vector<std::byte>& out, const std::string& s) {
    for (char c : s) out.push_back(std::byte(static_cast<unsigned char>(c)));
}

// Formats a float32 value with enough digits to reparse exactly.
std::string fmt_f32(float v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
    return buf;
}

struct LineReader {
    const std::vector<std::byte>& data;
    std::size_t pos = 0;

    bool eof() const { return pos >= data.size(); }

    // Returns the next line without the terminator; offset_out is the line start.
    std::string next_line(std::size_t& offset_out) {
        offset_out = pos;
        std::string line;
        while (pos < data.size()) {
            char c = static_cast<char>(std::to_integer<std::uint8_t>(data[pos++]));
            if (c == '\n') break;
            if (c != '\r') line.push_back(c);
        }
        return line;
    }
};

struct FieldLayout {
    int x = -1, y = -1, z = -1, rgb = -1;    // field indices
    std::vector<std::size_t> field_size;     // bytes per element
    std::vector<std::size_t> field_count;
    std::vector<char> field_type;            // F / U / I
    std::size_t point_stride() const {
        std::size_t s = 0;
        for (std::size_t i = 0; i < field_size.size(); ++i)
            s += field_size[i] * field_count[i];
        return s;
    }
    std::size_t field_offset(int idx) const {
        std::size_t o = 0;
        for (int i = 0; i < idx; ++i) o += field_size[i] * field_count[i];
        return o;
    }
};

// strtod-based tokenizer: stream extraction rejects "nan"/"inf", which
// sensors emit for invalid returns.
std::vector<double> parse_numbers(const std::string& line) {
    std::vector<double> vals;
    const char* p = line.c_str();
    while (*p) {
        char* end = nullptr;
        double v = std::strtod(p, &end);
        if (end == p) break;
        vals.push_back(v);
        p = end;
    }
    return vals;
}

Rgb unpack_rgb(std::uint32_t packed) {
    return Rgb{static_cast<std::uint8_t>((packed >> 16) & 0xff),
               static_cast<std::uint8_t>((packed >> 8) & 0xff),
               static_cast<std::uint8_t>(packed & 0xff)};
}

ParseResult parse_pcd(const std::vector<std::byte>& bytes) {
    LineReader rd{bytes};
    FieldLayout layout;
    std::vector<std::string> field_names;
    std::size_t n_points = 0;
    bool have_points = false;
    std::string data_mode;
    std::size_t body_offset = 0;

    while (!rd.eof()) {
        std::size_t line_off;
        std::string line = rd.next_line(line_off);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "VERSION" || key == "WIDTH" || key == "HEIGHT" ||
            key == "VIEWPOINT") {
            continue;
        } else if (key == "FIELDS") {
            std::string f;
            while (ss >> f) field_names.push_back(f);
            for (std::size_t i = 0; i < field_names.size(); ++i) {
                if (field_names[i] == "x") layout.x = static_cast<int>(i);
                else if (field_names[i] == "y") layout.y = static_cast<int>(i);
                else if (field_names[i] == "z") layout.z = static_cast<int>(i);
                else if (field_names[i] == "rgb" || field_names[i] == "rgba")
                    layout.rgb = static_cast<int>(i);
            }
        } else if (key == "SIZE") {
            std::size_t v;
            while (ss >> v) layout.field_size.push_back(v);
        } else if (key == "TYPE") {
            char t;
            while (ss >> t) layout.field_type.push_back(t);
        } else if (key == "COUNT") {
            std::size_t v;
            while (ss >> v) layout.field_count.push_back(v);
        } else if (key == "POINTS") {
            if (!(ss >> n_points))
                throw FormatError("bad POINTS line", line_off);
            have_points = true;
        } else if (key == "DATA") {
            ss >> data_mode;
            body_offset = rd.pos;
            break;
        } else {
            throw FormatError("unrecognized PCD header key '" + key + "'", line_off);
        }
    }

    if (layout.x < 0 || layout.y < 0 || layout.z < 0)
        throw FormatError("PCD header missing x/y/z fields", 0);
    if (!have_points)
        throw FormatError("PCD header missing POINTS", 0);
    if (layout.field_count.empty())
        layout.field_count.assign(field_names.size(), 1);
    if (layout.field_size.size() != field_names.size() ||
        layout.field_type.size() != field_names.size() ||
        layout.field_count.size() != field_names.size())
        throw FormatError("PCD SIZE/TYPE/COUNT arity mismatch with FIELDS", 0);
    if (data_mode == "binary_compressed" || data_mode == "binary_big_endian")
        throw UnsupportedFormatError("unsupported PCD encoding: " + data_mode);
    if (data_mode != "ascii" && data_mode != "binary")
        throw FormatError("missing or unknown DATA mode", body_offset);

    ParseResult res;
    res.cloud.reserve(n_points);
    bool want_rgb = layout.rgb >= 0;

    if (data_mode == "ascii") {
        LineReader body{bytes};
        body.pos = body_offset;
        std::size_t parsed = 0;
        while (parsed < n_points && !body.eof()) {
            std::size_t line_off;
            std::string line = body.next_line(line_off);
            if (line.empty()) continue;
            std::vector<double> vals = parse_numbers(line);
            if (vals.size() < field_names.size())
                throw FormatError("short PCD ascii record", line_off);
            Vec3 p(vals[layout.x], vals[layout.y], vals[layout.z]);
            ++parsed;
            if (!all_finite(p)) {
                ++res.dropped_non_finite;
                continue;
            }
            res.cloud.points.push_back(p);
            if (want_rgb) {
                double raw = vals[layout.rgb];
                std::uint32_t packed;
                if (layout.field_type[layout.rgb] == 'F') {
                    float f = static_cast<float>(raw);
                    std::memcpy(&packed, &f, 4);
                } else {
                    packed = static_cast<std::uint32_t>(raw);
                }
                res.cloud.colors.push_back(unpack_rgb(packed));
            }
        }
        if (parsed < n_points)
            throw TruncationError(n_points, parsed);
    } else {
        std::size_t stride = layout.point_stride();
        std::size_t avail = (bytes.size() - body_offset) / stride;
        if (avail < n_points)
            throw TruncationError(n_points, avail);
        std::size_t ox = layout.field_offset(layout.x);
        std::size_t oy = layout.field_offset(layout.y);
        std::size_t oz = layout.field_offset(layout.z);
        for (std::size_t i = 0; i < n_points; ++i) {
            const std::byte* rec = bytes.data() + body_offset + i * stride;
            Vec3 p(read_f32_le(rec + ox), read_f32_le(rec + oy), read_f32_le(rec + oz));
            if (!all_finite(p)) {
                ++res.dropped_non_finite;
                continue;
            }
            res.cloud.points.push_back(p);
            if (want_rgb) {
                std::size_t orgb = layout.field_offset(layout.rgb);
                std::uint32_t packed;
                std::memcpy(&packed, rec + orgb, 4);
                res.cloud.colors.push_back(unpack_rgb(packed));
            }
        }
    }
    if (!want_rgb) res.cloud.colors.clear();
    return res;
}

ParseResult parse_ply(const std::vector<std::byte>& bytes) {
    LineReader rd{bytes};
    std::size_t off;
    std::string magic = rd.next_line(off);
    if (magic != "ply") throw FormatError("missing 'ply' magic", off);

    bool binary = false;
    std::size_t n_vertices = 0;
    bool in_vertex_element = false;
    bool saw_format = false;
    struct Prop { std::string name; std::string type; };
    std::vector<Prop> vprops;

    while (!rd.eof()) {
        std::size_t line_off;
        std::string line = rd.next_line(line_off);
        if (line.empty() || line.rfind("comment", 0) == 0) continue;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "format") {
            std::string fmt, ver;
            ss >> fmt >> ver;
            if (fmt == "ascii") binary = false;
            else if (fmt == "binary_little_endian") binary = true;
            else throw UnsupportedFormatError("unsupported PLY format: " + fmt);
            saw_format = true;
        } else if (key == "element") {
            std::string name;
            std::size_t count;
            ss >> name >> count;
            in_vertex_element = (name == "vertex");
            if (in_vertex_element) n_vertices = count;
            else if (!vprops.empty()) in_vertex_element = false;
        } else if (key == "property") {
            if (!in_vertex_element) continue;
            std::string type, name;
            ss >> type >> name;
            if (type == "list")
                throw UnsupportedFormatError("list property on vertex element");
            vprops.push_back({name, type});
        } else if (key == "end_header") {
            break;
        } else {
            throw FormatError("unrecognized PLY header key '" + key + "'", line_off);
        }
    }
    if (!saw_format) throw FormatError("PLY header missing format line", 0);

    auto prop_size = [](const std::string& t) -> std::size_t {
        if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
        if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
        if (t == "int" || t == "uint" || t == "int32" || t == "uint32" || t == "float" || t == "float32") return 4;
        if (t == "double" || t == "float64") return 8;
        return 0;
    };

    int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1;
    for (std::size_t i = 0; i < vprops.size(); ++i) {
        if (vprops[i].name == "x") ix = static_cast<int>(i);
        else if (vprops[i].name == "y") iy = static_cast<int>(i);
        else if (vprops[i].name == "z") iz = static_cast<int>(i);
        else if (vprops[i].name == "red") ir = static_cast<int>(i);
        else if (vprops[i].name == "green") ig = static_cast<int>(i);
        else if (vprops[i].name == "blue") ib = static_cast<int>(i);
        if (prop_size(vprops[i].type) == 0)
            throw FormatError("unknown PLY property type " + vprops[i].type, 0);
    }
    if (ix < 0 || iy < 0 || iz < 0)
        throw FormatError("PLY vertex element missing x/y/z", 0);
    bool want_rgb = ir >= 0 && ig >= 0 && ib >= 0;

    ParseResult res;
    res.cloud.reserve(n_vertices);

    if (!binary) {
        std::size_t parsed = 0;
        while (parsed < n_vertices && !rd.eof()) {
            std::size_t line_off;
            std::string line = rd.next_line(line_off);
            if (line.empty()) continue;
            std::vector<double> vals = parse_numbers(line);
            if (vals.size() < vprops.size())
                throw FormatError("short PLY ascii vertex record", line_off);
            Vec3 p(vals[ix], vals[iy], vals[iz]);
            ++parsed;
            if (!all_finite(p)) {
                ++res.dropped_non_finite;
                continue;
            }
            res.cloud.points.push_back(p);
            if (want_rgb)
                res.cloud.colors.push_back(Rgb{static_cast<std::uint8_t>(vals[ir]),
                                               static_cast<std::uint8_t>(vals[ig]),
                                               static_cast<std::uint8_t>(vals[ib])});
        }
        if (parsed < n_vertices)
            throw TruncationError(n_vertices, parsed);
    } else {
        std::size_t stride = 0;
        std::vector<std::size_t> offsets(vprops.size());
        for (std::size_t i = 0; i < vprops.size(); ++i) {
            offsets[i] = stride;
            stride += prop_size(vprops[i].type);
        }
        std::size_t body = rd.pos;
        std::size_t avail = (bytes.size() - body) / stride;
        if (avail < n_vertices)
            throw TruncationError(n_vertices, avail);
        for (std::size_t i = 0; i < n_vertices; ++i) {
            const std::byte* rec = bytes.data() + body + i * stride;
            Vec3 p(read_f32_le(rec + offsets[ix]),
                   read_f32_le(rec + offsets[iy]),
                   read_f32_le(rec + offsets[iz]));
            if (!all_finite(p)) {
                ++res.dropped_non_finite;
                continue;
            }
            res.cloud.points.push_back(p);
            if (want_rgb)
                res.cloud.colors.push_back(
                    Rgb{std::to_integer<std::uint8_t>(rec[offsets[ir]]),
                        std::to_integer<std::uint8_t>(rec[offsets[ig]]),
                        std::to_integer<std::uint8_t>(rec[offsets[ib]])});
        }
    }
    if (!want_rgb) res.cloud.colors.clear();
    return res;
}

std::string pcd_header(const PointCloud& cloud, bool binary) {
    std::ostringstream h;
    bool rgb = cloud.has_colors();
    h << "# .PCD v0.7 - Point Cloud Data file format\n";
    h << "VERSION 0.7\n";
    h << "FIELDS x y z" << (rgb ? " rgb" : "") << "\n";
    h << "SIZE 4 4 4" << (rgb ? " 4" : "") << "\n";
    h << "TYPE F F F" << (rgb ? " U" : "") << "\n";
    h << "COUNT 1 1 1" << (rgb ? " 1" : "") << "\n";
    h << "WIDTH " << cloud.size() << "\n";
    h << "HEIGHT 1\n";
    h << "VIEWPOINT 0 0 0 1 0 0 0\n";
    h << "POINTS " << cloud.size() << "\n";
    h << "DATA " << (binary ? "binary" : "ascii") << "\n";
    return h.str();
}

std::string ply_header(const PointCloud& cloud, bool binary) {
    std::ostringstream h;
    h << "ply\n";
    h << "format " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n";
    h << "element vertex " << cloud.size() << "\n";
    h << "property float x\nproperty float y\nproperty float z\n";
    if (cloud.has_colors())
        h << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    h << "end_header\n";
    return h.str();
}

}  // namespace

ParseResult parse_cloud(const std::vector<std::byte>& bytes, FormatHint hint) {
    if (hint == FormatHint::auto_detect) {
        if (bytes.size() >= 3 &&
            std::to_integer<char>(bytes[0]) == 'p' &&
            std::to_integer<char>(bytes[1]) == 'l' &&
            std::to_integer<char>(bytes[2]) == 'y')
            hint = FormatHint::ply;
        else
            hint = FormatHint::pcd;
    }
    return hint == FormatHint::ply ? parse_ply(bytes) : parse_pcd(bytes);
}

std::vector<std::byte> write_cloud(const PointCloud& cloud, CloudFormat format) {
    std::vector<std::byte> out;
    bool rgb = cloud.has_colors();
    auto pack_rgb = [](const Rgb& c) -> std::uint32_t {
        return (std::uint32_t(c[0]) << 16) | (std::uint32_t(c[1]) << 8) | c[2];
    };

    switch (format) {
        case CloudFormat::pcd_ascii: {
            append_str(out, pcd_header(cloud, false));
            for (std::size_t i = 0; i < cloud.size(); ++i) {
                const Vec3& p = cloud.points[i];
                std::string line = fmt_f32(static_cast<float>(p.x())) + " " +
                                   fmt_f32(static_cast<float>(p.y())) + " " +
                                   fmt_f32(static_cast<float>(p.z()));
                if (rgb) line += " " + std::to_string(pack_rgb(cloud.colors[i]));
                line += "\n";
                append_str(out, line);
            }
            break;
        }
        case CloudFormat::pcd_binary: {
            append_str(out, pcd_header(cloud, true));
            for (std::size_t i = 0; i < cloud.size(); ++i) {
                const Vec3& p = cloud.points[i];
                append_f32_le(out, static_cast<float>(p.x()));
                append_f32_le(out, static_cast<float>(p.y()));
                append_f32_le(out, static_cast<float>(p.z()));
                if (rgb) {
                    std::uint32_t u = pack_rgb(cloud.colors[i]);
                    out.push_back(std::byte(u & 0xff));
                    out.push_back(std::byte((u >> 8) & 0xff));
                    out.push_back(std::byte((u >> 16) & 0xff));
                    out.push_back(std::byte((u >> 24) & 0xff));
                }
            }
            break;
        }
        case CloudFormat::ply_ascii: {
            append_str(out, ply_header(cloud, false));
            for (std::size_t i = 0; i < cloud.size(); ++i) {
                const Vec3& p = cloud.points[i];
                std::string line = fmt_f32(static_cast<float>(p.x())) + " " +
                                   fmt_f32(static_cast<float>(p.y())) + " " +
                                   fmt_f32(static_cast<float>(p.z()));
                if (rgb) {
                    const Rgb& c = cloud.colors[i];
                    line += " " + std::to_string(c[0]) + " " +
                            std::to_string(c[1]) + " " + std::to_string(c[2]);
                }
                line += "\n";
                append_str(out, line);
            }
            break;
        }
        case CloudFormat::ply_binary: {
            append_str(out, ply_header(cloud, true));
            for (std::size_t i = 0; i < cloud.size(); ++i) {
                const Vec3& p = cloud.points[i];
                append_f32_le(out, static_cast<float>(p.x()));
                append_f32_le(out, static_cast<float>(p.y()));
                append_f32_le(out, static_cast<float>(p.z()));
                if (rgb) {
                    const Rgb& c = cloud.colors[i];
                    out.push_back(std::byte(c[0]));
                    out.push_back(std::byte(c[1]));
                    out.push_back(std::byte(c[2]));
                }
            }
            break;
        }
    }
    return out;
}

ParseResult load_cloud_file(const std::string& path, FormatHint hint) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::vector<char> raw((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
    std::vector<std::byte> bytes(raw.size());
    std::memcpy(bytes.data(), raw.data(), raw.size());
    if (hint == FormatHint::auto_detect) {
        auto ends_with = [&](const char* s) {
            std::string suf(s);
            return path.size() >= suf.size() &&
                   path.compare(path.size() - suf.size(), suf.size(), suf) == 0;
        };
        if (ends_with(".ply")) hint = FormatHint::ply;
        else if (ends_with(".pcd")) hint = FormatHint::pcd;
    }
    return parse_cloud(bytes, hint);
}

void save_cloud_file(const std::string& path, const PointCloud& cloud,
                     CloudFormat format) {
    auto bytes = write_cloud(cloud, format);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

PointCloud transform_cloud(const PointCloud& cloud, const Pose6D& pose) {
    PointCloud out;
    out.frame_id = cloud.frame_id;
    out.colors = cloud.colors;
    out.points.resize(cloud.size());
    const Mat3 r = pose.rotation.toRotationMatrix();
    for (std::size_t i = 0; i < cloud.size(); ++i)
        out.points[i] = r * cloud.points[i] + pose.translation;
    return out;
}

}  // namespace leafpick
