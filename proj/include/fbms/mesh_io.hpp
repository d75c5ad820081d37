#pragma once

#include <fstream>
#include <iomanip>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbms/surface.hpp"

namespace fbms::surf {

// ASCII Wavefront OBJ with per-vertex normals ('v', 'vn', 'f' records).
inline void export_obj(const SurfaceMesh& mesh, const std::string& path) {
    if (mesh.vertices.empty() || mesh.faces.empty())
        throw std::invalid_argument("export_obj: empty mesh");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("export_obj: cannot open " + path);
    os << std::setprecision(17);
    os << "# disc stacking initial surface, N=" << mesh.N << " m=" << mesh.m << "\n";
    for (const auto& v : mesh.vertices)
        os << "v " << v.pos.x() << " " << v.pos.y() << " " << v.pos.z() << "\n";
    for (const auto& v : mesh.vertices)
        os << "vn " << v.normal.x() << " " << v.normal.y() << " " << v.normal.z() << "\n";
    for (const auto& f : mesh.faces)
        os << "f " << f[0] + 1 << "//" << f[0] + 1 << " " << f[1] + 1 << "//" << f[1] + 1 << " "
           << f[2] + 1 << "//" << f[2] + 1 << "\n";
    if (!os) throw std::runtime_error("export_obj: write failed for " + path);
}

struct ObjStats {
    std::size_t vertices = 0, normals = 0, faces = 0;
};

inline ObjStats import_obj_stats(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("import_obj_stats: cannot open " + path);
    ObjStats st;
    std::string line;
    while (std::getline(is, line)) {
        if (line.rfind("v ", 0) == 0) ++st.vertices;
        if (line.rfind("vn ", 0) == 0) ++st.normals;
        if (line.rfind("f ", 0) == 0) ++st.faces;
    }
    return st;
}

// Sidecar JSON with the per-vertex labels.
inline void export_labels(const SurfaceMesh& mesh, const std::string& path) {
    nlohmann::ordered_json j;
    j["N"] = mesh.N;
    j["m"] = mesh.m;
    j["resolution"] = mesh.resolution;
    j["vertex_count"] = mesh.vertices.size();
    j["face_count"] = mesh.faces.size();
    auto& labels = j["vertices"];
    labels = nlohmann::ordered_json::array();
    for (const auto& v : mesh.vertices) {
        nlohmann::ordered_json rec;
        rec["region"] = region_name(v.region);
        rec["layer"] = v.layer;
        rec["catenoid"] = v.catenoid;
        rec["meridian"] = v.meridian;
        rec["boundary"] = v.boundary;
        rec["rho"] = v.rho;
        labels.push_back(rec);
    }
    std::ofstream os(path);
    if (!os) throw std::runtime_error("export_labels: cannot open " + path);
    os << j.dump(1) << "\n";
}

// CSV of per-vertex scalar fields: id, region, layer, H, |A|^2, rho.
inline void export_field_csv(const SurfaceMesh& mesh, const std::vector<double>& H,
                             const std::vector<double>& normA2, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("export_field_csv: cannot open " + path);
    os << std::setprecision(17);
    os << "vertex,region,layer,H,normA2,rho\n";
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const auto& v = mesh.vertices[i];
        os << i << "," << region_name(v.region) << "," << v.layer << ","
           << (i < H.size() ? H[i] : 0.0) << "," << (i < normA2.size() ? normA2[i] : 0.0) << ","
           << v.rho << "\n";
    }
}

// CSV of (sigma, theta, omega) samples of one layer's height function.
inline void export_patch_csv(int layer, const balance::DerivedParams& d, int n_sigma, int n_theta,
                             const std::string& path) {
    const LayerSpec s = layer_spec(layer, d);
    const double half = M_PI / (2.0 * d.m);
    std::ofstream os(path);
    if (!os) throw std::runtime_error("export_patch_csv: cannot open " + path);
    os << std::setprecision(17);
    os << "sigma,theta,omega\n";
    for (int i = 0; i <= n_sigma; ++i)
        for (int j = 0; j <= n_theta; ++j) {
            const double sg = kSigmaMax * i / n_sigma;
            const double th = -half + 2.0 * half * j / n_theta;
            double om;
            try {
                om = height_local(s, sg, th);
            } catch (const std::domain_error&) {
                continue;  // perforation
            }
            os << sg << "," << th << "," << om << "\n";
        }
}

}  // namespace fbms::surf
