#include "holopt/io.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace holopt {

using json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream f(path, mode);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    return f;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream f(path, mode);
    // A missing or unreadable input is a caller mistake, not an internal
    // failure: invalid_argument maps to the usage exit code in the CLI.
    if (!f) throw std::invalid_argument("cannot open for reading: " + path);
    return f;
}

json load_json(const std::string& path) {
    auto f = open_in(path);
    json j;
    try {
        f >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec3_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 3)
        throw std::invalid_argument(what + " must be a 3-element array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

void write_pgm(const std::string& path, const PgmImage& img) {
    if (img.nx < 1 || img.ny < 1 ||
        img.pixels.size() != static_cast<size_t>(img.nx) * img.ny)
        throw std::invalid_argument("PGM image shape does not match pixel count");
    auto f = open_out(path, std::ios::binary);
    f << "P5\n" << img.nx << " " << img.ny << "\n255\n";
    f.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

PgmImage read_pgm(const std::string& path) {
    auto f = open_in(path, std::ios::binary);
    auto next_token = [&f, &path]() {
        std::string tok;
        int c;
        while ((c = f.get()) != EOF) {
            if (c == '#') {  // comment to end of line
                while ((c = f.get()) != EOF && c != '\n') {}
                continue;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) return tok;
                continue;
            }
            tok.push_back(static_cast<char>(c));
        }
        if (tok.empty()) throw std::invalid_argument("truncated PGM header: " + path);
        return tok;
    };
    if (next_token() != "P5")
        throw std::invalid_argument("not a binary (P5) PGM file: " + path);
    PgmImage img;
    img.nx = std::stoi(next_token());
    img.ny = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (img.nx < 1 || img.ny < 1)
        throw std::invalid_argument("bad PGM dimensions in " + path);
    if (maxval != 255)
        throw std::invalid_argument("only 8-bit (maxval 255) PGM supported: " + path);
    img.pixels.resize(static_cast<size_t>(img.nx) * img.ny);
    f.read(reinterpret_cast<char*>(img.pixels.data()),
           static_cast<std::streamsize>(img.pixels.size()));
    if (f.gcount() != static_cast<std::streamsize>(img.pixels.size()))
        throw std::invalid_argument("truncated PGM pixel data: " + path);
    return img;
}

namespace {

void write_grid_files(const std::string& stem, const double* data, size_t count, int nx, int ny,
                      double dx, const char* kind) {
    {
        auto f = open_out(stem + ".bin", std::ios::binary);
        f.write(reinterpret_cast<const char*>(data),
                static_cast<std::streamsize>(count * sizeof(double)));
        if (!f) throw std::runtime_error("write failed: " + stem + ".bin");
    }
    json side;
    side["nx"] = nx;
    side["ny"] = ny;
    side["dx_m"] = dx;
    side["kind"] = kind;
    auto f = open_out(stem + ".json");
    f << side.dump(2) << "\n";
    if (!f) throw std::runtime_error("write failed: " + stem + ".json");
}

struct GridHeader {
    int nx = 0, ny = 0;
    double dx = 0.0;
    std::string kind;
};

GridHeader read_grid_header(const std::string& stem) {
    const json side = load_json(stem + ".json");
    GridHeader h;
    try {
        h.nx = side.at("nx").get<int>();
        h.ny = side.at("ny").get<int>();
        h.dx = side.at("dx_m").get<double>();
        h.kind = side.at("kind").get<std::string>();
    } catch (const json::exception& e) {
        throw std::invalid_argument("malformed grid sidecar " + stem + ".json: " + e.what());
    }
    if (h.nx < 1 || h.ny < 1 || !(h.dx > 0.0))
        throw std::invalid_argument("bad grid dimensions in " + stem + ".json");
    return h;
}

void read_grid_data(const std::string& stem, double* out, size_t count) {
    auto f = open_in(stem + ".bin", std::ios::binary);
    f.read(reinterpret_cast<char*>(out), static_cast<std::streamsize>(count * sizeof(double)));
    if (f.gcount() != static_cast<std::streamsize>(count * sizeof(double)))
        throw std::invalid_argument("grid data size mismatch: " + stem + ".bin");
    f.get();
    if (!f.eof()) throw std::invalid_argument("grid data size mismatch: " + stem + ".bin");
}

}  // namespace

void write_complex_grid(const std::string& stem, const ComplexPlane& plane) {
    validate(plane);
    static_assert(sizeof(std::complex<double>) == 2 * sizeof(double));
    write_grid_files(stem, reinterpret_cast<const double*>(plane.values.data()),
                     plane.values.size() * 2, plane.nx, plane.ny, plane.dx, "complex128");
}

ComplexPlane read_complex_grid(const std::string& stem) {
    const auto h = read_grid_header(stem);
    if (h.kind != "complex128")
        throw std::invalid_argument("grid " + stem + " is not complex128 (got " + h.kind + ")");
    ComplexPlane plane;
    plane.nx = h.nx;
    plane.ny = h.ny;
    plane.dx = h.dx;
    plane.values.resize(static_cast<size_t>(h.nx) * h.ny);
    read_grid_data(stem, reinterpret_cast<double*>(plane.values.data()),
                   plane.values.size() * 2);
    return plane;
}

void write_real_grid(const std::string& stem, const RealPlane& plane) {
    if (plane.values.size() != static_cast<size_t>(plane.nx) * plane.ny || !(plane.dx > 0.0))
        throw std::invalid_argument("real grid shape does not match value count");
    write_grid_files(stem, plane.values.data(), plane.values.size(), plane.nx, plane.ny,
                     plane.dx, "float64");
}

RealPlane read_real_grid(const std::string& stem) {
    const auto h = read_grid_header(stem);
    if (h.kind != "float64")
        throw std::invalid_argument("grid " + stem + " is not float64 (got " + h.kind + ")");
    RealPlane plane;
    plane.nx = h.nx;
    plane.ny = h.ny;
    plane.dx = h.dx;
    plane.values.resize(static_cast<size_t>(h.nx) * h.ny);
    read_grid_data(stem, plane.values.data(), plane.values.size());
    return plane;
}

void write_layout(const std::string& path, const ArrayLayout& layout) {
    json j;
    j["label"] = layout.label;
    j["transducers"] = json::array();
    for (const auto& t : layout.transducers) {
        json jt;
        jt["pos"] = vec3_to_json(t.position);
        jt["normal"] = vec3_to_json(t.normal);
        jt["radius"] = t.radius;
        jt["p_ref"] = t.p_ref;
        j["transducers"].push_back(std::move(jt));
    }
    j["seed_info"] = nullptr;
    auto f = open_out(path);
    f << j.dump(2) << "\n";
    if (!f) throw std::runtime_error("write failed: " + path);
}

ArrayLayout read_layout(const std::string& path) {
    const json j = load_json(path);
    ArrayLayout layout;
    try {
        layout.label = j.at("label").get<std::string>();
        for (const auto& jt : j.at("transducers")) {
            Transducer t;
            t.position = vec3_from_json(jt.at("pos"), "transducer pos");
            t.normal = vec3_from_json(jt.at("normal"), "transducer normal");
            t.radius = jt.at("radius").get<double>();
            t.p_ref = jt.at("p_ref").get<double>();
            layout.transducers.push_back(t);
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument("malformed layout file " + path + ": " + e.what());
    }
    validate(layout);
    return layout;
}

void write_control_points(const std::string& path, const ControlPointSet& set) {
    json j;
    j["points"] = json::array();
    for (const auto& p : set.points) {
        json jp;
        jp["pos"] = vec3_to_json(p.position);
        jp["amp"] = p.amplitude;
        j["points"].push_back(std::move(jp));
    }
    auto f = open_out(path);
    f << j.dump(2) << "\n";
    if (!f) throw std::runtime_error("write failed: " + path);
}

ControlPointSet read_control_points(const std::string& path) {
    const json j = load_json(path);
    ControlPointSet set;
    try {
        for (const auto& jp : j.at("points")) {
            ControlPoint p;
            p.position = vec3_from_json(jp.at("pos"), "control point pos");
            p.amplitude = jp.at("amp").get<double>();
            set.points.push_back(p);
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument("malformed control point file " + path + ": " + e.what());
    }
    if (set.points.empty())
        throw std::invalid_argument("control point file " + path + " has no points");
    return set;
}

void write_phases(const std::string& path, const PhaseVector& phases) {
    json j = json::array();
    for (double p : phases) j.push_back(wrap_phase(p));
    auto f = open_out(path);
    f << j.dump() << "\n";
    if (!f) throw std::runtime_error("write failed: " + path);
}

PhaseVector read_phases(const std::string& path) {
    const json j = load_json(path);
    if (!j.is_array()) throw std::invalid_argument("phase file " + path + " must be a JSON array");
    PhaseVector phases;
    for (const auto& v : j) phases.push_back(v.get<double>());
    return phases;
}

void write_run_record(const std::string& path, const RunRecord& rec) {
    json j;
    j["seed"] = rec.seed;
    j["iterations"] = rec.loss_history.empty() ? 0 : rec.loss_history.size() - 1;
    j["loss_history"] = rec.loss_history;
    j["rp_mean_history"] = rec.rp_mean_history;
    j["rp_std_history"] = rec.rp_std_history;
    j["final_phases"] = rec.final_phases;
    j["wall_ms"] = rec.wall_ms;
    auto f = open_out(path);
    f << j.dump(2) << "\n";
    if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace holopt
