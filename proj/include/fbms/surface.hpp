#pragma once

#include <map>
#include <unordered_map>

#include "fbms/prism.hpp"

namespace fbms {

struct TriMesh2D {
    std::vector<Complex> points;
    std::vector<std::array<int, 3>> triangles;
};

namespace detail {

// Bowyer-Watson Delaunay triangulation. Points are expected to be distinct
// and non-degenerate (interior points carry a deterministic jitter).
inline std::vector<std::array<int, 3>> delaunay(const std::vector<Complex>& pts) {
    struct Tri {
        int a, b, c;
        double cx, cy, rr;
        bool alive = true;
    };
    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (const auto& p : pts) {
        lo_x = std::min(lo_x, p.real());
        hi_x = std::max(hi_x, p.real());
        lo_y = std::min(lo_y, p.imag());
        hi_y = std::max(hi_y, p.imag());
    }
    const double span = std::max(hi_x - lo_x, hi_y - lo_y) + 1.0;
    const double mx = 0.5 * (lo_x + hi_x), my = 0.5 * (lo_y + hi_y);
    std::vector<Complex> P = pts;
    const int n = static_cast<int>(pts.size());
    P.push_back({mx - 20 * span, my - 10 * span});
    P.push_back({mx + 20 * span, my - 10 * span});
    P.push_back({mx, my + 20 * span});

    auto circum = [&P](Tri& t) {
        const Complex A = P[t.a], B = P[t.b], C = P[t.c];
        const double d = 2.0 * ((B.real() - A.real()) * (C.imag() - A.imag()) -
                                (B.imag() - A.imag()) * (C.real() - A.real()));
        const double a2 = std::norm(A), b2 = std::norm(B), c2 = std::norm(C);
        t.cx = ((b2 - a2) * (C.imag() - A.imag()) - (c2 - a2) * (B.imag() - A.imag())) / d;
        t.cy = ((c2 - a2) * (B.real() - A.real()) - (b2 - a2) * (C.real() - A.real())) / d;
        t.rr = (t.cx - A.real()) * (t.cx - A.real()) + (t.cy - A.imag()) * (t.cy - A.imag());
    };

    std::vector<Tri> tris;
    {
        Tri t{n, n + 1, n + 2, 0, 0, 0, true};
        circum(t);
        tris.push_back(t);
    }
    std::vector<int> bad;
    std::map<std::pair<int, int>, int> edge_count;
    for (int ip = 0; ip < n; ++ip) {
        bad.clear();
        edge_count.clear();
        const double px = P[ip].real(), py = P[ip].imag();
        for (std::size_t it = 0; it < tris.size(); ++it) {
            if (!tris[it].alive) continue;
            const double dx = px - tris[it].cx, dy = py - tris[it].cy;
            if (dx * dx + dy * dy < tris[it].rr * (1.0 + 1e-12)) bad.push_back(static_cast<int>(it));
        }
        auto add_edge = [&edge_count](int a, int b) {
            const auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
            ++edge_count[key];
        };
        for (int it : bad) {
            add_edge(tris[it].a, tris[it].b);
            add_edge(tris[it].b, tris[it].c);
            add_edge(tris[it].c, tris[it].a);
            tris[it].alive = false;
        }
        for (const auto& [edge, count] : edge_count) {
            if (count != 1) continue; // interior edge of the cavity
            Tri t{edge.first, edge.second, ip, 0, 0, 0, true};
            // consistent orientation
            const Complex A = P[t.a], B = P[t.b], C = P[t.c];
            const double orient = (B.real() - A.real()) * (C.imag() - A.imag()) -
                                  (B.imag() - A.imag()) * (C.real() - A.real());
            if (orient < 0) std::swap(t.a, t.b);
            circum(t);
            tris.push_back(t);
        }
    }
    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris) {
        if (!t.alive) continue;
        if (t.a >= n || t.b >= n || t.c >= n) continue;
        out.push_back({t.a, t.b, t.c});
    }
    return out;
}

} // namespace detail

// One octant of the planar model: {X >= 0, Y >= 0, |z| <= 1} minus the three
// member-1/member-2 hole sectors it meets. Boundary points carry their circle
// index and azimuth so solution traces can be used on them.
struct FundamentalMesh {
    TriMesh2D mesh;
    std::vector<int> on_circle;    // per point: model circle index, or -1
    std::vector<double> azimuth;   // valid when on_circle >= 0
};

inline FundamentalMesh mesh_fundamental_domain(const PlanarModel& model, double h) {
    if (model.groups != std::vector<int>{1, 2, 3})
        throw DegenerateMesh("fundamental meshing needs the full canonical model");
    const double r1 = model.circles[model.circle_index(1, 1)].geo_radius;
    const double r2 = model.circles[model.circle_index(2, 1)].geo_radius;
    const double r3 = model.circles[model.circle_index(3, 1)].geo_radius;
    const double s3 = std::tan(r3 / 2);
    const double x1 = 1.0 / std::cos(r1) - std::tan(r1); // near X-axis point of hole 1
    const double y2 = 1.0 / std::cos(r2) - std::tan(r2);

    FundamentalMesh out;
    auto push = [&out](const Complex& z, int circle, double phi) {
        out.mesh.points.push_back(z);
        out.on_circle.push_back(circle);
        out.azimuth.push_back(phi);
    };

    const int k1 = model.circle_index(1, 1);
    const int k2 = model.circle_index(2, 1);
    const int k3 = model.circle_index(3, 2);
    const auto& c1 = model.circles[k1];
    const auto& c2 = model.circles[k2];
    const auto& c3 = model.circles[k3];

    // boundary chain; arc spans in plane angle, sampled at spacing ~ h
    auto sample_count = [&h](double len) { return std::max(3, static_cast<int>(std::ceil(len / h))); };

    // X-axis segment (s3, x1), exclusive ends
    {
        const int n = sample_count(x1 - s3);
        for (int i = 1; i < n; ++i) push({s3 + (x1 - s3) * i / n, 0.0}, -1, 0.0);
    }
    // plane arc length over an azimuth span, by coarse quadrature
    auto arc_length = [](const BoundaryCircle& c, double pa, double pb) {
        double len = 0.0;
        const int m = 24;
        for (int i = 0; i < m; ++i) len += c.speed(pa + (pb - pa) * (i + 0.5) / m);
        return std::abs(pb - pa) * len / m;
    };

    // hole-1 arc from the X axis up to the unit-circle junction
    {
        const double phi_axis = c1.azimuth({x1, 0.0});
        const double phi_junc = c1.azimuth(Complex{std::cos(r1), std::sin(r1)});
        const int n = sample_count(arc_length(c1, phi_axis, phi_junc));
        for (int i = 0; i <= n; ++i) {
            const double phi = phi_axis + (phi_junc - phi_axis) * i / n;
            push(c1.point(phi), k1, phi);
        }
    }
    // unit circle arc between the hole junctions (mirror of the inversion)
    {
        const int n = sample_count(pi / 2 - r2 - r1);
        for (int i = 1; i < n; ++i) {
            const double t = r1 + (pi / 2 - r2 - r1) * i / n;
            push({std::cos(t), std::sin(t)}, -1, 0.0);
        }
    }
    // hole-2 arc from the unit-circle junction down to the Y axis
    {
        const double phi_junc = c2.azimuth(Complex{std::sin(r2), std::cos(r2)});
        const double phi_axis = c2.azimuth({0.0, y2});
        const int n = sample_count(arc_length(c2, phi_junc, phi_axis));
        for (int i = 0; i <= n; ++i) {
            const double phi = phi_junc + (phi_axis - phi_junc) * i / n;
            push(c2.point(phi), k2, phi);
        }
    }
    // Y-axis segment (y2, s3), exclusive ends
    {
        const int n = sample_count(y2 - s3);
        for (int i = 1; i < n; ++i) push({0.0, y2 - (y2 - s3) * i / n}, -1, 0.0);
    }
    // quarter arc of the inner hole (group 3, member 2), Y axis to X axis
    {
        const double phi_y = c3.azimuth({0.0, s3});
        const double phi_x = c3.azimuth({s3, 0.0});
        const int n = sample_count(arc_length(c3, phi_y, phi_x));
        for (int i = 0; i <= n; ++i) {
            const double phi = phi_y + (phi_x - phi_y) * i / n;
            push(c3.point(phi), k3, phi);
        }
    }

    // interior fill: jittered triangular lattice clipped away from the boundary
    auto inside = [&](const Complex& z) {
        if (z.real() < 1e-12 || z.imag() < 1e-12) return false;
        if (std::abs(z) > 1.0 - 1e-12) return false;
        for (const auto& c : {c1, c2, c3})
            if (std::abs(z - c.circle.center) < c.circle.radius + 1e-12) return false;
        return true;
    };
    auto clearance = [&](const Complex& z) {
        double d = std::min({z.real(), z.imag(), 1.0 - std::abs(z)});
        for (const auto& c : {c1, c2, c3})
            d = std::min(d, std::abs(z - c.circle.center) - c.circle.radius);
        return d;
    };
    const double dy = h * std::sqrt(3.0) / 2.0;
    int row = 0;
    for (double y = dy / 2; y < 1.0; y += dy, ++row) {
        for (double x = (row % 2 ? h / 2 : h); x < 1.0; x += h) {
            // deterministic tiny jitter breaks cocircular lattice degeneracies
            const unsigned hsh = static_cast<unsigned>(row * 7349 + static_cast<int>(x / h) * 131);
            const double jx = ((hsh % 101) / 101.0 - 0.5) * 0.08 * h;
            const double jy = (((hsh / 101) % 103) / 103.0 - 0.5) * 0.08 * h;
            const Complex z{x + jx, y + jy};
            if (!inside(z) || clearance(z) < 0.55 * h) continue;
            push(z, -1, 0.0);
        }
    }

    out.mesh.triangles = detail::delaunay(out.mesh.points);

    // keep triangles whose centroid lies inside the octant
    std::vector<std::array<int, 3>> kept;
    for (const auto& t : out.mesh.triangles) {
        const Complex g = (out.mesh.points[t[0]] + out.mesh.points[t[1]] + out.mesh.points[t[2]]) / 3.0;
        if (!inside(g)) continue;
        kept.push_back(t);
    }
    out.mesh.triangles = std::move(kept);

    // drop isolated points is unnecessary; check quality
    for (const auto& t : out.mesh.triangles) {
        const Complex A = out.mesh.points[t[0]], B = out.mesh.points[t[1]], C = out.mesh.points[t[2]];
        const double area = 0.5 * std::abs((B.real() - A.real()) * (C.imag() - A.imag()) -
                                           (B.imag() - A.imag()) * (C.real() - A.real()));
        const double edge = std::max({std::abs(B - A), std::abs(C - B), std::abs(A - C)});
        if (!(area > 1e-8 * edge * edge)) throw DegenerateMesh("sliver triangle in the octant mesh");
    }
    return out;
}

// The full-domain mesh obtained by applying all eight reflections to the
// octant and identifying coincident vertices.
struct UnfoldedMesh {
    std::vector<Complex> plane;                 // vertex preimages
    std::vector<int> source;                    // fundamental vertex index
    std::vector<unsigned> element;              // reflection bitmask that produced it
    std::vector<std::array<int, 3>> triangles;
    std::vector<int> tri_source;                // fundamental triangle index
    std::vector<unsigned> tri_element;

    int euler_characteristic() const {
        std::map<std::pair<int, int>, int> edges;
        for (const auto& t : triangles)
            for (int e = 0; e < 3; ++e) {
                const int a = t[e], b = t[(e + 1) % 3];
                ++edges[a < b ? std::make_pair(a, b) : std::make_pair(b, a)];
            }
        return static_cast<int>(plane.size()) - static_cast<int>(edges.size()) +
               static_cast<int>(triangles.size());
    }

    // boundary loops as vertex cycles (edges used by exactly one triangle)
    std::vector<std::vector<int>> boundary_loops() const {
        std::map<std::pair<int, int>, int> edges;
        for (const auto& t : triangles)
            for (int e = 0; e < 3; ++e) {
                const int a = t[e], b = t[(e + 1) % 3];
                ++edges[a < b ? std::make_pair(a, b) : std::make_pair(b, a)];
            }
        std::multimap<int, int> adj;
        for (const auto& [e, c] : edges)
            if (c == 1) {
                adj.insert({e.first, e.second});
                adj.insert({e.second, e.first});
            }
        std::vector<std::vector<int>> loops;
        std::unordered_map<int, bool> used;
        for (auto it = adj.begin(); it != adj.end(); ++it) {
            if (used[it->first]) continue;
            std::vector<int> loop;
            int v = it->first, prev = -1;
            while (true) {
                loop.push_back(v);
                used[v] = true;
                auto range = adj.equal_range(v);
                int next = -1;
                for (auto jt = range.first; jt != range.second; ++jt)
                    if (jt->second != prev && !used[jt->second]) {
                        next = jt->second;
                        break;
                    }
                if (next < 0) break;
                prev = v;
                v = next;
            }
            if (loop.size() >= 3) loops.push_back(std::move(loop));
        }
        return loops;
    }
};

inline UnfoldedMesh unfold_octant(const PlanarModel& model, const FundamentalMesh& fm) {
    UnfoldedMesh out;
    const int nf = static_cast<int>(fm.mesh.points.size());
    std::unordered_map<long long, int> dedup;
    auto key = [](const Complex& z) {
        const long long kx = llround(z.real() / 1e-9), ky = llround(z.imag() / 1e-9);
        return kx * 1000003LL + ky;
    };
    std::vector<std::array<int, 8>> image(nf);
    for (unsigned g = 0; g < 8; ++g) {
        for (int v = 0; v < nf; ++v) {
            Complex z = fm.mesh.points[v];
            for (int axis = 1; axis <= 3; ++axis)
                if ((g >> (axis - 1)) & 1u) z = model.reflection(axis).apply(z);
            const long long k = key(z);
            auto it = dedup.find(k);
            if (it == dedup.end()) {
                const int idx = static_cast<int>(out.plane.size());
                dedup.emplace(k, idx);
                out.plane.push_back(z);
                out.source.push_back(v);
                out.element.push_back(g);
                image[v][g] = idx;
            } else {
                image[v][g] = it->second;
            }
        }
    }
    for (unsigned g = 0; g < 8; ++g) {
        const bool flip = (__builtin_popcount(g) % 2) != 0;
        for (std::size_t f = 0; f < fm.mesh.triangles.size(); ++f) {
            auto t = fm.mesh.triangles[f];
            std::array<int, 3> mapped{image[t[0]][g], image[t[1]][g], image[t[2]][g]};
            if (flip) std::swap(mapped[1], mapped[2]);
            out.triangles.push_back(mapped);
            out.tri_source.push_back(static_cast<int>(f));
            out.tri_element.push_back(g);
        }
    }
    return out;
}

// character of component i under reflection bitmask g (odd under rho_i)
inline double component_sign(int i, unsigned g) { return ((g >> (i - 1)) & 1u) ? -1.0 : 1.0; }

// Triangulated image of the harmonic map into the prism, with conformality
// and free-boundary residuals.
struct SurfaceSample {
    std::vector<Complex> preimage;
    std::vector<std::array<double, 3>> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<double> conformal_factor; // per vertex
    std::vector<double> hopf_residual;    // per triangle, |phi| / |grad u|^2
    double max_hopf = 0.0;
    double max_orthogonality = 0.0;  // angle (radians) between nu(u) and the face normal
    double max_lemma_residual = 0.0; // | unit conormal - (u_i/a_i) e_i |
    int genus = -1;
    int n_boundary_loops = 0;
    std::vector<int> loop_group;         // boundary group per loop
    std::vector<double> loop_axis_error; // max | |u_i| - a_i | over the loop
    double min_face_margin = 1e300;      // min over loops of distance to the face edge
    double symmetry_defect = 0.0;        // vertex-set mismatch under the target reflections
    bool half_scaled = false;
};

struct SurfaceOptions {
    double mesh_h = 0.03;
    BasisSpec basis;
    double gate_grad_norm = 1e-6;
    bool half_scale = false;

    SurfaceOptions() { basis.order = 40; }
};

inline SurfaceSample assemble_surface(const ModuliPoint& p, const PrismConfig& cfg,
                                      const SurfaceOptions& opts = {}) {
    const OddData d = odd_data(p, cfg, opts.basis);
    const auto grad = energy_gradient(d);
    if (norm3(grad) >= opts.gate_grad_norm) throw NotCritical(norm3(grad));
    const PlanarModel& model = d.model();

    const FundamentalMesh fm = mesh_fundamental_domain(model, opts.mesh_h);
    const UnfoldedMesh um = unfold_octant(model, fm);
    const int nf = static_cast<int>(fm.mesh.points.size());

    // values and gradients on the octant
    std::vector<std::array<double, 3>> val(nf);
    std::vector<std::array<Complex, 3>> grd(nf);
    for (int v = 0; v < nf; ++v)
        for (int i = 0; i < 3; ++i) {
            val[v][i] = d.u[i].value(fm.mesh.points[v]);
            grd[v][i] = d.u[i].gradient(fm.mesh.points[v]);
        }

    SurfaceSample out;
    out.preimage = um.plane;
    out.triangles = um.triangles;
    out.half_scaled = opts.half_scale;
    const double scale = opts.half_scale ? 0.5 : 1.0;
    out.vertices.resize(um.plane.size());
    out.conformal_factor.resize(um.plane.size());
    for (std::size_t v = 0; v < um.plane.size(); ++v) {
        const int s = um.source[v];
        const unsigned g = um.element[v];
        for (int i = 1; i <= 3; ++i) out.vertices[v][i - 1] = scale * component_sign(i, g) * val[s][i - 1];
        double gx = 0, gy = 0;
        for (int i = 0; i < 3; ++i) {
            gx += grd[s][i].real() * grd[s][i].real();
            gy += grd[s][i].imag() * grd[s][i].imag();
        }
        out.conformal_factor[v] = scale * std::sqrt(0.5 * (gx + gy));
    }

    // Hopf residual per fundamental triangle at the centroid, replicated
    std::vector<double> fund_hopf(fm.mesh.triangles.size());
    for (std::size_t f = 0; f < fm.mesh.triangles.size(); ++f) {
        const auto& t = fm.mesh.triangles[f];
        const Complex c = (fm.mesh.points[t[0]] + fm.mesh.points[t[1]] + fm.mesh.points[t[2]]) / 3.0;
        double xx = 0, yy = 0, xy = 0;
        for (int i = 0; i < 3; ++i) {
            const Complex gi = d.u[i].gradient(c);
            xx += gi.real() * gi.real();
            yy += gi.imag() * gi.imag();
            xy += gi.real() * gi.imag();
        }
        const double phi_abs = std::hypot(xx - yy, 2.0 * xy);
        fund_hopf[f] = phi_abs / std::max(1e-300, xx + yy);
    }
    out.hopf_residual.resize(um.triangles.size());
    for (std::size_t f = 0; f < um.triangles.size(); ++f) {
        out.hopf_residual[f] = fund_hopf[um.tri_source[f]];
        out.max_hopf = std::max(out.max_hopf, out.hopf_residual[f]);
    }

    // boundary conditions along the hole arcs of the octant
    for (int v = 0; v < nf; ++v) {
        const int k = fm.on_circle[v];
        if (k < 0) continue;
        const int group = model.circles[k].group;
        const double phi = fm.azimuth[v];
        const auto& bc = model.circles[k];
        const double speed = bc.speed(phi);
        // conormal of the map: per-component derivative along the outward normal
        std::array<double, 3> nu{};
        for (int i = 0; i < 3; ++i) nu[i] = d.u[i].flux_density_series(k).eval(phi) / speed;
        const double norm_nu = std::sqrt(nu[0] * nu[0] + nu[1] * nu[1] + nu[2] * nu[2]);
        const double cosang = std::abs(nu[group - 1]) / std::max(1e-300, norm_nu);
        out.max_orthogonality = std::max(out.max_orthogonality, std::acos(std::min(1.0, cosang)));
        const double target = val[v][group - 1] / cfg.a(group);
        double lemma = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double want = (i == group - 1) ? target : 0.0;
            lemma += (nu[i] / norm_nu - want) * (nu[i] / norm_nu - want);
        }
        out.max_lemma_residual = std::max(out.max_lemma_residual, std::sqrt(lemma));
    }

    // topology
    const int chi = um.euler_characteristic();
    const auto loops = um.boundary_loops();
    out.n_boundary_loops = static_cast<int>(loops.size());
    out.genus = (2 - out.n_boundary_loops - chi) / 2;

    for (const auto& loop : loops) {
        // identify the boundary group by the preimage circle of the loop
        const int fund_v = um.source[loop.front()];
        const int k = fm.on_circle[fund_v];
        const int group = k >= 0 ? model.circles[k].group : 0;
        out.loop_group.push_back(group);
        double axis_err = 0.0, margin = 1e300;
        for (int v : loop) {
            const auto& x = out.vertices[v];
            axis_err = std::max(axis_err,
                                std::abs(std::abs(x[group - 1]) - scale * cfg.a(group)));
            for (int j = 1; j <= 3; ++j) {
                if (j == group) continue;
                margin = std::min(margin, scale * cfg.a(j) - std::abs(x[j - 1]));
            }
        }
        out.loop_axis_error.push_back(axis_err);
        out.min_face_margin = std::min(out.min_face_margin, margin);
    }

    // symmetry of the image vertex set under the three target reflections:
    // the worst distance from a reflected vertex to the vertex set
    {
        const double cell = 5e-4;
        std::unordered_map<long long, std::vector<int>> grid;
        auto cell_key = [cell](double x, double y, double z) {
            const long long a = llround(std::floor(x / cell)), b = llround(std::floor(y / cell)),
                            c = llround(std::floor(z / cell));
            return (a * 1000003LL + b) * 1000003LL + c;
        };
        for (std::size_t v = 0; v < out.vertices.size(); ++v)
            grid[cell_key(out.vertices[v][0], out.vertices[v][1], out.vertices[v][2])].push_back(
                static_cast<int>(v));
        auto nearest = [&](const std::array<double, 3>& y) {
            double best = 1e300;
            const long long ax = llround(std::floor(y[0] / cell));
            const long long ay = llround(std::floor(y[1] / cell));
            const long long az = llround(std::floor(y[2] / cell));
            for (long long dx = -1; dx <= 1; ++dx)
                for (long long dy = -1; dy <= 1; ++dy)
                    for (long long dz = -1; dz <= 1; ++dz) {
                        const auto it = grid.find(((ax + dx) * 1000003LL + ay + dy) * 1000003LL + az + dz);
                        if (it == grid.end()) continue;
                        for (int v : it->second) {
                            const auto& x = out.vertices[v];
                            const double d2 = (x[0] - y[0]) * (x[0] - y[0]) +
                                              (x[1] - y[1]) * (x[1] - y[1]) +
                                              (x[2] - y[2]) * (x[2] - y[2]);
                            best = std::min(best, d2);
                        }
                    }
            return best < 1e300 ? std::sqrt(best) : cell;
        };
        double defect = 0.0;
        for (const auto& x : out.vertices)
            for (int i = 0; i < 3; ++i) {
                std::array<double, 3> y = x;
                y[i] = -y[i];
                defect = std::max(defect, nearest(y));
            }
        out.symmetry_defect = defect;
    }
    return out;
}

// Supremum over sample points of | u(R x) - P u(x) | where R is the plane
// realization of the cyclic axis rotation (x,y,z) -> (y,z,x) and P the
// matching permutation of the components. Meaningful for symmetric data
// (equal radii and equal half-sides).
inline double permutation_symmetry_defect(const OddData& d) {
    const PlanarModel& model = d.model();
    const StereographicChart& chart = model.chart;
    auto rotate = [&chart](const Complex& z) {
        const Vec3 P = chart.unproject(z);
        return chart.project({P.y, P.z, P.x});
    };
    double defect = 0.0;
    int used = 0;
    for (int a = 0; a < 24 && used < 200; ++a) {
        for (int b = 1; b < 10; ++b) {
            const double ang = two_pi * (a + 0.37) / 24;
            const double rad = 0.15 + 1.8 * b / 10.0;
            const Complex z{rad * std::cos(ang), rad * std::sin(ang)};
            if (!model.contains(z, 0.0) || model.boundary_clearance(z) < 2e-2) continue;
            const Complex w = rotate(z);
            if (!model.contains(w, 0.0) || model.boundary_clearance(w) < 1e-6) continue;
            ++used;
            // u1(Rx) = u2(x), u2(Rx) = u3(x), u3(Rx) = u1(x)
            defect = std::max(defect, std::abs(d.u[0].value(w) - d.u[1].value(z)));
            defect = std::max(defect, std::abs(d.u[1].value(w) - d.u[2].value(z)));
            defect = std::max(defect, std::abs(d.u[2].value(w) - d.u[0].value(z)));
        }
    }
    return defect;
}

} // namespace fbms
