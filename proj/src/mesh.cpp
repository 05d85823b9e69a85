#include "sdfplan/mesh.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace sdfplan {

static_assert(std::endian::native == std::endian::little,
              "binary PLY and checkpoint IO assume a little-endian host");

double TriangleMesh::face_area(size_t f) const {
    const Vec3 a = face_vertex(f, 0), b = face_vertex(f, 1), c = face_vertex(f, 2);
    return 0.5 * norm(cross(b - a, c - a));
}

double TriangleMesh::total_area() const {
    double s = 0.0;
    for (size_t f = 0; f < faces.size(); ++f) s += face_area(f);
    return s;
}

void TriangleMesh::recompute_bounds() {
    bounds = Aabb{};
    for (const Vec3& v : vertices) bounds.expand(v);
}

void TriangleMesh::validate() const {
    if (vertices.empty() || faces.empty()) throw InvalidInput("mesh is empty");
    for (const Tri& t : faces)
        for (uint32_t idx : t)
            if (idx >= vertices.size())
                throw InvalidInput("face index " + std::to_string(idx) + " out of range (" +
                                   std::to_string(vertices.size()) + " vertices)");
}

// ---------------------------------------------------------------------------
// OBJ

namespace {

[[noreturn]] void parse_fail(const std::string& name, size_t line, const std::string& what) {
    throw DataError(name + ":" + std::to_string(line) + ": " + what);
}

} // namespace

TriangleMesh parse_obj(std::istream& in, const std::string& name) {
    TriangleMesh mesh;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            Vec3 v;
            if (!(ls >> v.x >> v.y >> v.z)) parse_fail(name, lineno, "malformed vertex record");
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<long> idx;
            std::string tok;
            while (ls >> tok) {
                // accept v, v/vt, v//vn, v/vt/vn — only the vertex index is used
                const size_t slash = tok.find('/');
                const std::string head = slash == std::string::npos ? tok : tok.substr(0, slash);
                try {
                    idx.push_back(std::stol(head));
                } catch (const std::exception&) {
                    parse_fail(name, lineno, "malformed face index '" + tok + "'");
                }
            }
            if (idx.size() < 3) parse_fail(name, lineno, "face with fewer than 3 vertices");
            auto resolve = [&](long i) -> uint32_t {
                const long n = static_cast<long>(mesh.vertices.size());
                long r = i > 0 ? i - 1 : n + i; // OBJ is 1-based; negatives are relative
                if (r < 0 || r >= n) parse_fail(name, lineno, "face index out of range");
                return static_cast<uint32_t>(r);
            };
            const uint32_t v0 = resolve(idx[0]);
            for (size_t k = 1; k + 1 < idx.size(); ++k)
                mesh.faces.push_back({v0, resolve(idx[k]), resolve(idx[k + 1])});
        }
        // other records (vn, vt, o, g, s, usemtl, mtllib) are ignored
    }
    if (mesh.vertices.empty() || mesh.faces.empty())
        throw InvalidInput(name + ": mesh has no triangles");
    mesh.validate();
    mesh.recompute_bounds();
    return mesh;
}

// ---------------------------------------------------------------------------
// PLY — ascii 1.0 and binary_little_endian 1.0, vertex x/y/z, face index list.

namespace {

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

size_t ply_type_size(PlyType t) {
    switch (t) {
        case PlyType::Int8:
        case PlyType::UInt8: return 1;
        case PlyType::Int16:
        case PlyType::UInt16: return 2;
        case PlyType::Int32:
        case PlyType::UInt32:
        case PlyType::Float32: return 4;
        case PlyType::Float64: return 8;
    }
    return 0;
}

PlyType ply_type_from(const std::string& s, const std::string& name, size_t line) {
    if (s == "char" || s == "int8") return PlyType::Int8;
    if (s == "uchar" || s == "uint8") return PlyType::UInt8;
    if (s == "short" || s == "int16") return PlyType::Int16;
    if (s == "ushort" || s == "uint16") return PlyType::UInt16;
    if (s == "int" || s == "int32") return PlyType::Int32;
    if (s == "uint" || s == "uint32") return PlyType::UInt32;
    if (s == "float" || s == "float32") return PlyType::Float32;
    if (s == "double" || s == "float64") return PlyType::Float64;
    parse_fail(name, line, "unsupported PLY type '" + s + "'");
}

double read_binary_scalar(std::istream& in, PlyType t, const std::string& name) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(ply_type_size(t)));
    if (!in) throw DataError(name + ": truncated binary PLY payload at offset " +
                             std::to_string(in.tellg()));
    switch (t) {
        case PlyType::Int8: return static_cast<double>(static_cast<int8_t>(buf[0]));
        case PlyType::UInt8: return static_cast<double>(buf[0]);
        case PlyType::Int16: { int16_t v; std::memcpy(&v, buf, 2); return v; }
        case PlyType::UInt16: { uint16_t v; std::memcpy(&v, buf, 2); return v; }
        case PlyType::Int32: { int32_t v; std::memcpy(&v, buf, 4); return v; }
        case PlyType::UInt32: { uint32_t v; std::memcpy(&v, buf, 4); return v; }
        case PlyType::Float32: { float v; std::memcpy(&v, buf, 4); return v; }
        case PlyType::Float64: { double v; std::memcpy(&v, buf, 8); return v; }
    }
    return 0.0;
}

struct PlyProperty {
    std::string name;
    PlyType type = PlyType::Float32;
    bool is_list = false;
    PlyType count_type = PlyType::UInt8;
};

struct PlyElement {
    std::string name;
    size_t count = 0;
    std::vector<PlyProperty> props;
};

} // namespace

TriangleMesh parse_ply(std::istream& in, const std::string& name) {
    std::string line;
    size_t lineno = 0;
    auto next_line = [&]() -> std::string {
        if (!std::getline(in, line)) parse_fail(name, lineno, "unexpected end of PLY header");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++lineno;
        return line;
    };

    if (next_line() != "ply") parse_fail(name, lineno, "missing 'ply' magic");
    bool binary = false;
    std::vector<PlyElement> elements;
    for (;;) {
        std::istringstream ls(next_line());
        std::string tag;
        ls >> tag;
        if (tag == "comment" || tag == "obj_info") continue;
        if (tag == "format") {
            std::string fmt, ver;
            ls >> fmt >> ver;
            if (fmt == "ascii") binary = false;
            else if (fmt == "binary_little_endian") binary = true;
            else parse_fail(name, lineno, "unsupported PLY format '" + fmt + "'");
        } else if (tag == "element") {
            PlyElement el;
            if (!(ls >> el.name >> el.count)) parse_fail(name, lineno, "malformed element record");
            elements.push_back(el);
        } else if (tag == "property") {
            if (elements.empty()) parse_fail(name, lineno, "property before any element");
            PlyProperty p;
            std::string t;
            ls >> t;
            if (t == "list") {
                std::string ct, vt;
                if (!(ls >> ct >> vt >> p.name)) parse_fail(name, lineno, "malformed list property");
                p.is_list = true;
                p.count_type = ply_type_from(ct, name, lineno);
                p.type = ply_type_from(vt, name, lineno);
            } else {
                if (!(ls >> p.name)) parse_fail(name, lineno, "malformed property record");
                p.type = ply_type_from(t, name, lineno);
            }
            elements.back().props.push_back(p);
        } else if (tag == "end_header") {
            break;
        } else {
            parse_fail(name, lineno, "unknown header record '" + tag + "'");
        }
    }

    TriangleMesh mesh;
    auto read_scalar = [&](PlyType t) -> double {
        if (binary) return read_binary_scalar(in, t, name);
        double v;
        if (!(in >> v)) throw DataError(name + ": truncated ascii PLY payload");
        return v;
    };

    for (const PlyElement& el : elements) {
        if (el.name == "vertex") {
            int ix = -1, iy = -1, iz = -1;
            for (size_t i = 0; i < el.props.size(); ++i) {
                if (el.props[i].name == "x") ix = static_cast<int>(i);
                if (el.props[i].name == "y") iy = static_cast<int>(i);
                if (el.props[i].name == "z") iz = static_cast<int>(i);
            }
            if (ix < 0 || iy < 0 || iz < 0)
                throw DataError(name + ": PLY vertex element lacks x/y/z properties");
            mesh.vertices.reserve(el.count);
            for (size_t v = 0; v < el.count; ++v) {
                Vec3 p;
                for (size_t i = 0; i < el.props.size(); ++i) {
                    if (el.props[i].is_list)
                        throw DataError(name + ": list property on vertex element unsupported");
                    const double val = read_scalar(el.props[i].type);
                    if (static_cast<int>(i) == ix) p.x = val;
                    if (static_cast<int>(i) == iy) p.y = val;
                    if (static_cast<int>(i) == iz) p.z = val;
                }
                mesh.vertices.push_back(p);
            }
        } else if (el.name == "face") {
            mesh.faces.reserve(el.count);
            for (size_t f = 0; f < el.count; ++f) {
                for (const PlyProperty& p : el.props) {
                    if (!p.is_list) { read_scalar(p.type); continue; }
                    const auto n = static_cast<size_t>(read_scalar(p.count_type));
                    std::vector<uint32_t> idx(n);
                    for (size_t k = 0; k < n; ++k)
                        idx[k] = static_cast<uint32_t>(read_scalar(p.type));
                    if (p.name == "vertex_indices" || p.name == "vertex_index") {
                        if (n < 3) throw DataError(name + ": PLY face with fewer than 3 indices");
                        for (size_t k = 1; k + 1 < n; ++k)
                            mesh.faces.push_back({idx[0], idx[k], idx[k + 1]});
                    }
                }
            }
        } else {
            // skip unknown elements
            for (size_t i = 0; i < el.count; ++i) {
                for (const PlyProperty& p : el.props) {
                    if (p.is_list) {
                        const auto n = static_cast<size_t>(read_scalar(p.count_type));
                        for (size_t k = 0; k < n; ++k) read_scalar(p.type);
                    } else {
                        read_scalar(p.type);
                    }
                }
            }
        }
    }
    if (mesh.vertices.empty() || mesh.faces.empty())
        throw InvalidInput(name + ": mesh has no triangles");
    mesh.validate();
    mesh.recompute_bounds();
    return mesh;
}

// ---------------------------------------------------------------------------

TriangleMesh load_mesh(const std::string& path, MeshFormat format) {
    if (format == MeshFormat::Auto) {
        const size_t dot = path.rfind('.');
        const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
        if (ext == "obj" || ext == "OBJ") format = MeshFormat::Obj;
        else if (ext == "ply" || ext == "PLY") format = MeshFormat::Ply;
        else throw DataError(path + ": cannot infer mesh format from extension");
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("scene not found: " + path);
    return format == MeshFormat::Obj ? parse_obj(in, path) : parse_ply(in, path);
}

SceneTransform normalize_mesh(TriangleMesh& mesh, const Aabb& box, double margin_fraction) {
    if (!box.valid()) throw InvalidInput("world box is empty");
    mesh.recompute_bounds();
    const Vec3 msize = mesh.bounds.size();
    const Vec3 bsize = box.size();
    double scale = std::numeric_limits<double>::max();
    for (int a = 0; a < 3; ++a) {
        const double usable = bsize[a] * (1.0 - 2.0 * margin_fraction);
        if (msize[a] > 0.0) scale = std::min(scale, usable / msize[a]);
    }
    if (scale == std::numeric_limits<double>::max()) scale = 1.0;
    SceneTransform t;
    t.scale = scale;
    t.translation = box.center() - mesh.bounds.center() * scale;
    for (Vec3& v : mesh.vertices) v = t.apply(v);
    mesh.recompute_bounds();
    return t;
}

// ---------------------------------------------------------------------------
// Writers

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out.precision(9);
    return out;
}

} // namespace

void write_ply_points(const std::string& path, std::span<const Vec3> points) {
    auto out = open_out(path);
    out << "ply\nformat ascii 1.0\nelement vertex " << points.size()
        << "\nproperty float x\nproperty float y\nproperty float z\nend_header\n";
    for (const Vec3& p : points) out << p.x << " " << p.y << " " << p.z << "\n";
}

void write_ply_mesh(const std::string& path, const TriangleMesh& mesh) {
    auto out = open_out(path);
    out << "ply\nformat ascii 1.0\nelement vertex " << mesh.vertices.size()
        << "\nproperty float x\nproperty float y\nproperty float z\nelement face "
        << mesh.faces.size() << "\nproperty list uchar int vertex_indices\nend_header\n";
    for (const Vec3& p : mesh.vertices) out << p.x << " " << p.y << " " << p.z << "\n";
    for (const Tri& f : mesh.faces) out << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
}

void write_obj(const std::string& path, const TriangleMesh& mesh) {
    auto out = open_out(path);
    for (const Vec3& p : mesh.vertices) out << "v " << p.x << " " << p.y << " " << p.z << "\n";
    for (const Tri& f : mesh.faces)
        out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
}

} // namespace sdfplan
