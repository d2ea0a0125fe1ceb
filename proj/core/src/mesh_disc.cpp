#include "conefield/mesh_disc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace conefield {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

struct Ring {
    double r = 0.0;
    std::vector<double> angles;  // sorted, in [0, 2pi)
    int offset = 0;              // index of the first node of this ring
};

struct SpacingProfile {
    double h;
    double fine;  // h / refine_factor
    std::vector<double> pole_radii;

    double operator()(double r) const {
        double s = h;
        for (double rho : pole_radii) {
            const double d = std::abs(r - rho);
            const double zone = 4.0 * h;
            if (d <= zone) {
                s = std::min(s, fine);
            } else if (d <= 2.0 * zone) {
                const double t = (d - zone) / zone;
                s = std::min(s, fine + t * (h - fine));
            }
        }
        return s;
    }
};

// Subdivide [a, b] into steps matched to the spacing profile: place points at
// equal quantiles of the cumulative density 1/s(r).
std::vector<double> march_interval(double a, double b, const SpacingProfile& s) {
    std::vector<double> out;
    if (b - a <= 1e-14) return out;
    const int samples = 512;
    std::vector<double> cum(samples + 1, 0.0);
    double prev_w = 1.0 / s(a);
    for (int i = 1; i <= samples; ++i) {
        const double x = a + (b - a) * i / samples;
        const double w = 1.0 / s(x);
        cum[i] = cum[i - 1] + 0.5 * (prev_w + w) * (b - a) / samples;
        prev_w = w;
    }
    const double total = cum[samples];
    const int steps = std::max(1, static_cast<int>(std::llround(total)));
    out.reserve(steps);
    int idx = 1;
    for (int k = 1; k < steps; ++k) {
        const double target = total * k / steps;
        while (idx < samples && cum[idx] < target) ++idx;
        const double t = (target - cum[idx - 1]) / (cum[idx] - cum[idx - 1]);
        out.push_back(a + (b - a) * (idx - 1 + t) / samples);
    }
    out.push_back(b);
    return out;
}

double signed_area(Vec2 a, Vec2 b, Vec2 c) {
    return 0.5 * (b - a).cross(c - a);
}

}  // namespace

DiscMesh build_mesh(double R, double h, const std::vector<Vec2>& refine_at,
                    double refine_factor) {
    if (!(R > 0.0) || !(h > 0.0) || h >= R) {
        throw std::invalid_argument("build_mesh: requires 0 < h < R");
    }
    if (refine_factor < 1.0) {
        throw std::invalid_argument("build_mesh: refine_factor must be >= 1");
    }
    for (const Vec2& p : refine_at) {
        if (p.norm() >= 0.5 * R) {
            throw std::invalid_argument("build_mesh: refine points must lie in B_{R/2}");
        }
    }

    SpacingProfile spacing{h, h / refine_factor, {}};
    for (const Vec2& p : refine_at) spacing.pole_radii.push_back(p.norm());
    std::sort(spacing.pole_radii.begin(), spacing.pole_radii.end());

    // Anchor radii: 0, every distinct pole radius, R.
    std::vector<double> anchors{0.0};
    for (double rho : spacing.pole_radii) {
        if (rho > 1e-12 * R && rho < R - 1e-12 * R) {
            if (anchors.empty() || rho - anchors.back() > 1e-12 * R) {
                anchors.push_back(rho);
            }
        }
    }
    anchors.push_back(R);

    std::vector<double> radii;
    for (std::size_t k = 0; k + 1 < anchors.size(); ++k) {
        const auto seg = march_interval(anchors[k], anchors[k + 1], spacing);
        radii.insert(radii.end(), seg.begin(), seg.end());
    }

    DiscMesh mesh;
    mesh.radius = R;
    mesh.target_h = h;
    mesh.nodes.push_back({0.0, 0.0});

    std::vector<Ring> rings;
    rings.reserve(radii.size());
    for (double r : radii) {
        Ring ring;
        ring.r = r;
        const double s = spacing(r);
        int m = std::max({8, static_cast<int>(std::ceil(kTwoPi * r / s)),
                          static_cast<int>(std::ceil(48.0 * r / R))});
        m += m & 1;  // even counts keep the node set reflection friendly
        ring.angles.resize(m);
        for (int j = 0; j < m; ++j) ring.angles[j] = kTwoPi * j / m;
        rings.push_back(std::move(ring));
    }

    // Snap the nearest ring angle to each refinement point so a node lands
    // exactly on it.
    for (const Vec2& p : refine_at) {
        const double rho = p.norm();
        if (rho <= 1e-12 * R) continue;  // the center node already matches
        double theta = std::atan2(p.y, p.x);
        if (theta < 0.0) theta += kTwoPi;
        Ring* best = nullptr;
        for (Ring& ring : rings) {
            if (std::abs(ring.r - rho) <= 1e-9 * std::max(1.0, R)) {
                best = &ring;
                break;
            }
        }
        if (best == nullptr) {
            throw std::logic_error("build_mesh: no anchored ring for refine point");
        }
        int j_best = 0;
        double d_best = std::numeric_limits<double>::infinity();
        const int m = static_cast<int>(best->angles.size());
        for (int j = 0; j < m; ++j) {
            double d = std::abs(best->angles[j] - theta);
            d = std::min(d, kTwoPi - d);
            if (d < d_best) {
                d_best = d;
                j_best = j;
            }
        }
        best->angles[j_best] = theta;
        std::sort(best->angles.begin(), best->angles.end());
    }

    for (Ring& ring : rings) {
        ring.offset = static_cast<int>(mesh.nodes.size());
        for (double a : ring.angles) {
            mesh.nodes.push_back({ring.r * std::cos(a), ring.r * std::sin(a)});
        }
    }

    // Re-pin snapped nodes to the exact refinement coordinates.
    for (const Vec2& p : refine_at) {
        int best = 0;
        double d_best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
            const double d = (mesh.nodes[i] - p).norm();
            if (d < d_best) {
                d_best = d;
                best = static_cast<int>(i);
            }
        }
        if (d_best > 1e-6 * std::max(1.0, R)) {
            throw std::logic_error("build_mesh: refine point not captured by a node");
        }
        mesh.nodes[best] = p;
    }

    auto add_cell = [&mesh](int a, int b, int c) {
        const double area = signed_area(mesh.nodes[a], mesh.nodes[b], mesh.nodes[c]);
        if (area > 0.0) {
            mesh.cells.push_back({a, b, c});
        } else if (area < 0.0) {
            mesh.cells.push_back({a, c, b});
        } else {
            throw std::runtime_error("build_mesh: degenerate cell");
        }
    };

    // Central fan.
    {
        const Ring& first = rings.front();
        const int m = static_cast<int>(first.angles.size());
        for (int j = 0; j < m; ++j) {
            add_cell(0, first.offset + j, first.offset + (j + 1) % m);
        }
    }

    // Zipper every annulus band. Both rings are uniform up to small in-slot
    // snaps that preserve the angle ordering, so the merge pattern is decided
    // on the exact rational slot positions (ci+1)/mi vs (cj+1)/mo. Integer
    // comparisons keep the pattern deterministic and equivariant under ring
    // rotations, which symmetric pole layouts rely on.
    for (std::size_t k = 0; k + 1 < rings.size(); ++k) {
        const Ring& in = rings[k];
        const Ring& out = rings[k + 1];
        const int mi = static_cast<int>(in.angles.size());
        const int mo = static_cast<int>(out.angles.size());

        int i = 0, j = 0;
        long long ci = 0, cj = 0;
        while (ci < mi || cj < mo) {
            const bool advance_i =
                ci < mi &&
                (cj >= mo || (ci + 1) * static_cast<long long>(mo) <=
                                 (cj + 1) * static_cast<long long>(mi));
            if (advance_i) {
                const int i2 = (i + 1) % mi;
                add_cell(in.offset + i, in.offset + i2, out.offset + j);
                i = i2;
                ++ci;
            } else {
                const int j2 = (j + 1) % mo;
                add_cell(in.offset + i, out.offset + j, out.offset + j2);
                j = j2;
                ++cj;
            }
        }
    }

    // Geometry caches.
    const std::size_t nc = mesh.cells.size();
    mesh.cell_areas.resize(nc);
    mesh.cell_grads.resize(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        const auto& tri = mesh.cells[c];
        const Vec2 a = mesh.nodes[tri[0]];
        const Vec2 b = mesh.nodes[tri[1]];
        const Vec2 d = mesh.nodes[tri[2]];
        const double area = signed_area(a, b, d);
        if (!(area > 0.0)) throw std::runtime_error("build_mesh: non-positive area");
        mesh.cell_areas[c] = area;
        const double inv = 1.0 / (2.0 * area);
        const auto perp = [](Vec2 v) { return Vec2{-v.y, v.x}; };
        mesh.cell_grads[c][0] = perp(d - b) * inv;
        mesh.cell_grads[c][1] = perp(a - d) * inv;
        mesh.cell_grads[c][2] = perp(b - a) * inv;
    }

    mesh.node_on_boundary.assign(mesh.nodes.size(), 0);
    {
        const Ring& last = rings.back();
        for (std::size_t j = 0; j < last.angles.size(); ++j) {
            const int idx = last.offset + static_cast<int>(j);
            mesh.node_on_boundary[idx] = 1;
            mesh.boundary_nodes.push_back(idx);
        }
    }

    mesh.node_cells.assign(mesh.nodes.size(), {});
    for (std::size_t c = 0; c < nc; ++c) {
        for (int v : mesh.cells[c]) mesh.node_cells[v].push_back(static_cast<int>(c));
    }

    // Location bins.
    mesh.bins_per_side = std::max(8, static_cast<int>(std::ceil(R / h)));
    mesh.bin_width = 2.0 * R / mesh.bins_per_side;
    mesh.bin_cells.assign(
        static_cast<std::size_t>(mesh.bins_per_side) * mesh.bins_per_side, {});
    auto bin_of = [&mesh, R](double v) {
        int b = static_cast<int>((v + R) / mesh.bin_width);
        return std::clamp(b, 0, mesh.bins_per_side - 1);
    };
    for (std::size_t c = 0; c < nc; ++c) {
        const auto& tri = mesh.cells[c];
        double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
        for (int v : tri) {
            x0 = std::min(x0, mesh.nodes[v].x);
            x1 = std::max(x1, mesh.nodes[v].x);
            y0 = std::min(y0, mesh.nodes[v].y);
            y1 = std::max(y1, mesh.nodes[v].y);
        }
        for (int bx = bin_of(x0); bx <= bin_of(x1); ++bx) {
            for (int by = bin_of(y0); by <= bin_of(y1); ++by) {
                mesh.bin_cells[static_cast<std::size_t>(by) * mesh.bins_per_side + bx]
                    .push_back(static_cast<int>(c));
            }
        }
    }
    return mesh;
}

double DiscMesh::total_area() const {
    double s = 0.0;
    for (double a : cell_areas) s += a;
    return s;
}

std::array<double, 3> DiscMesh::barycentric(int cell, Vec2 p) const {
    const auto& tri = cells[cell];
    const Vec2 a = nodes[tri[0]];
    const Vec2 b = nodes[tri[1]];
    const Vec2 c = nodes[tri[2]];
    const double inv = 1.0 / (2.0 * cell_areas[cell]);
    const double l0 = (b - p).cross(c - p) * inv;
    const double l1 = (c - p).cross(a - p) * inv;
    const double l2 = (a - p).cross(b - p) * inv;
    return {l0, l1, l2};
}

int DiscMesh::locate(Vec2 p) const {
    if (bins_per_side == 0) return -1;
    const int bx = std::clamp(static_cast<int>((p.x + radius) / bin_width), 0,
                              bins_per_side - 1);
    const int by = std::clamp(static_cast<int>((p.y + radius) / bin_width), 0,
                              bins_per_side - 1);
    const auto& cand = bin_cells[static_cast<std::size_t>(by) * bins_per_side + bx];
    for (int c : cand) {
        const auto l = barycentric(c, p);
        if (l[0] >= -1e-10 && l[1] >= -1e-10 && l[2] >= -1e-10) return c;
    }
    return -1;
}

int DiscMesh::nearest_node(Vec2 p) const {
    int best = -1;
    double d_best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double d = (nodes[i] - p).norm();
        if (d < d_best) {
            d_best = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

double DiscMesh::cell_diameter(int cell) const {
    const auto& tri = cells[cell];
    const Vec2 a = nodes[tri[0]];
    const Vec2 b = nodes[tri[1]];
    const Vec2 c = nodes[tri[2]];
    return std::max({(a - b).norm(), (b - c).norm(), (c - a).norm()});
}

double DiscMesh::min_edge_within(Vec2 center, double r) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto& tri = cells[c];
        bool near = false;
        for (int v : tri) {
            if ((nodes[v] - center).norm() <= r) near = true;
        }
        if (!near) continue;
        const Vec2 a = nodes[tri[0]];
        const Vec2 b = nodes[tri[1]];
        const Vec2 d = nodes[tri[2]];
        best = std::min({best, (a - b).norm(), (b - d).norm(), (d - a).norm()});
    }
    return best;
}

ScalarField::ScalarField(const DiscMesh& mesh)
    : mesh_(&mesh), values_(mesh.nodes.size(), 0.0) {}

ScalarField::ScalarField(const DiscMesh& mesh, std::vector<double> values)
    : mesh_(&mesh), values_(std::move(values)) {
    if (values_.size() != mesh.nodes.size()) {
        throw std::invalid_argument("ScalarField: value count mismatch");
    }
}

void ScalarField::set_values(std::vector<double> values) {
    if (values.size() != mesh_->nodes.size()) {
        throw std::invalid_argument("ScalarField: value count mismatch");
    }
    values_ = std::move(values);
    grads_valid_ = false;
}

const std::vector<Vec2>& ScalarField::cell_gradients() const {
    if (!grads_valid_) {
        grads_.assign(mesh_->cells.size(), {});
        for (std::size_t c = 0; c < mesh_->cells.size(); ++c) {
            Vec2 g{0.0, 0.0};
            for (int k = 0; k < 3; ++k) {
                g = g + mesh_->cell_grads[c][k] * values_[mesh_->cells[c][k]];
            }
            grads_[c] = g;
        }
        grads_valid_ = true;
    }
    return grads_;
}

std::vector<Vec2> cell_gradient(const ScalarField& f) {
    return f.cell_gradients();
}

double integrate_cellwise(const DiscMesh& mesh,
                          const std::vector<double>& cell_values) {
    if (cell_values.size() != mesh.cells.size()) {
        throw std::invalid_argument("integrate_cellwise: size mismatch");
    }
    double s = 0.0;
    for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
        s += cell_values[c] * mesh.cell_areas[c];
    }
    return s;
}

double integrate(const ScalarField& f) {
    const DiscMesh& mesh = f.mesh();
    double s = 0.0;
    for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
        const auto& tri = mesh.cells[c];
        const double mean = (f[tri[0]] + f[tri[1]] + f[tri[2]]) / 3.0;
        s += mean * mesh.cell_areas[c];
    }
    return s;
}

double interpolate(const ScalarField& f, Vec2 p) {
    const int c = f.mesh().locate(p);
    if (c < 0) throw std::domain_error("interpolate: point outside mesh");
    const auto l = f.mesh().barycentric(c, p);
    const auto& tri = f.mesh().cells[c];
    return l[0] * f[tri[0]] + l[1] * f[tri[1]] + l[2] * f[tri[2]];
}

RingFlux boundary_ring_flux(const ScalarField& f, double r, int samples) {
    const DiscMesh& mesh = f.mesh();
    if (!(r > 0.0) || r >= mesh.radius) {
        throw std::invalid_argument("boundary_ring_flux: radius out of range");
    }
    samples = std::max(samples, 256);
    const auto& grads = f.cell_gradients();
    RingFlux out;
    // Averaging over a thin annulus of sub-rings cancels the band-position
    // bias a single circle picks up on ring-structured meshes.
    const double spread = 0.75 * mesh.target_h;
    const double offsets[4] = {-spread, -spread / 3.0, spread / 3.0, spread};
    double flux_sum = 0.0;
    int rings_used = 0;
    for (double off : offsets) {
        const double rr =
            std::clamp(r + off, 1e-9 * mesh.radius, mesh.radius * (1.0 - 1e-9));
        double sum = 0.0;
        int used = 0;
        for (int k = 0; k < samples; ++k) {
            const double a = kTwoPi * k / samples;
            const Vec2 p{rr * std::cos(a), rr * std::sin(a)};
            const int c = mesh.locate(p);
            if (c < 0) {
                ++out.skipped;
                continue;
            }
            const Vec2 g = grads[c];
            const double g2 = g.dot(g);
            if (g2 >= 1.0 - 1e-12) {
                ++out.skipped;
                continue;
            }
            const Vec2 flux_vec = g * (1.0 / std::sqrt(1.0 - g2));
            sum += flux_vec.dot(p) / rr;
            ++used;
        }
        if (used == 0) continue;
        flux_sum += sum * kTwoPi * rr / used;
        ++rings_used;
    }
    if (rings_used == 0) {
        throw std::runtime_error("boundary_ring_flux: no usable samples");
    }
    out.flux = flux_sum / rings_used;
    return out;
}

}  // namespace conefield
