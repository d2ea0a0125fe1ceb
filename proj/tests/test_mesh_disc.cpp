#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <cstring>

#include "conefield/fundamental_radial.hpp"
#include "conefield/mesh_disc.hpp"

using namespace conefield;

TEST_CASE("coarse disc mesh is valid") {
    const DiscMesh mesh = build_mesh(1.0, 0.5);
    CHECK(mesh.cells.size() >= 4);
    for (double a : mesh.cell_areas) CHECK(a > 0.0);
    CHECK(mesh.total_area() == doctest::Approx(M_PI).epsilon(0.005));
    for (int b : mesh.boundary_nodes) {
        CHECK(std::abs(mesh.nodes[b].norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("node count scales quadratically under h halving") {
    const DiscMesh coarse = build_mesh(1.0, 1.0 / 16.0);
    const DiscMesh fine = build_mesh(1.0, 1.0 / 32.0);
    const double ratio =
        static_cast<double>(fine.nodes.size()) / coarse.nodes.size();
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("refinement shrinks edges near the requested point") {
    const double h = 1.0 / 16.0;
    const DiscMesh mesh = build_mesh(1.0, h, {{0.0, 0.0}}, 4.0);
    CHECK(mesh.min_edge_within({0.0, 0.0}, 2.0 * h) <= h / 3.0);
    const DiscMesh off = build_mesh(2.0, 2.0 * h, {{0.45, 0.2}}, 4.0);
    CHECK(off.min_edge_within({0.45, 0.2}, 2.0 * h) <= (2.0 * h) / 3.0);
}

TEST_CASE("refine points become mesh nodes") {
    const Vec2 p{0.3, 0.4};
    const DiscMesh mesh = build_mesh(2.0, 0.125, {p}, 4.0);
    const int node = mesh.nearest_node(p);
    CHECK((mesh.nodes[node] - p).norm() == 0.0);
}

TEST_CASE("mesh construction is deterministic") {
    const DiscMesh a = build_mesh(2.0, 0.1, {{0.4, -0.1}}, 2.0);
    const DiscMesh b = build_mesh(2.0, 0.1, {{0.4, -0.1}}, 2.0);
    REQUIRE(a.nodes.size() == b.nodes.size());
    REQUIRE(a.cells.size() == b.cells.size());
    CHECK(std::memcmp(a.nodes.data(), b.nodes.data(),
                      a.nodes.size() * sizeof(Vec2)) == 0);
    CHECK(std::memcmp(a.cells.data(), b.cells.data(),
                      a.cells.size() * sizeof(a.cells[0])) == 0);
}

TEST_CASE("degenerate build arguments are rejected") {
    CHECK_THROWS_AS(build_mesh(1.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(build_mesh(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_mesh(1.0, 0.1, {{0.8, 0.0}}, 2.0),
                    std::invalid_argument);
}

TEST_CASE("cell gradients reproduce linear fields exactly") {
    const DiscMesh mesh = build_mesh(1.5, 0.2, {{0.2, 0.1}}, 2.0);
    std::vector<double> vx(mesh.nodes.size()), vlin(mesh.nodes.size()),
        vc(mesh.nodes.size(), 7.0);
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        vx[i] = mesh.nodes[i].x;
        vlin[i] = 3.0 * mesh.nodes[i].x - 2.0 * mesh.nodes[i].y;
    }
    for (const Vec2& g : cell_gradient(ScalarField(mesh, vx))) {
        CHECK(std::abs(g.x - 1.0) < 1e-12);
        CHECK(std::abs(g.y) < 1e-12);
    }
    for (const Vec2& g : cell_gradient(ScalarField(mesh, vlin))) {
        CHECK(std::abs(g.x - 3.0) < 1e-11);
        CHECK(std::abs(g.y + 2.0) < 1e-11);
    }
    for (const Vec2& g : cell_gradient(ScalarField(mesh, vc))) {
        CHECK(std::abs(g.x) < 1e-12);
        CHECK(std::abs(g.y) < 1e-12);
    }
}

TEST_CASE("integration rules") {
    const DiscMesh mesh = build_mesh(1.0, 1.0 / 64.0);
    ScalarField ones(mesh, std::vector<double>(mesh.nodes.size(), 1.0));
    CHECK(integrate(ones) == doctest::Approx(M_PI).epsilon(0.005));

    std::vector<double> odd(mesh.nodes.size());
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) odd[i] = mesh.nodes[i].x;
    CHECK(std::abs(integrate(ScalarField(mesh, odd))) < 1e-10 * M_PI);

    std::vector<double> r2(mesh.nodes.size());
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        r2[i] = mesh.nodes[i].dot(mesh.nodes[i]);
    }
    CHECK(integrate(ScalarField(mesh, r2)) ==
          doctest::Approx(M_PI / 2.0).epsilon(0.01));

    CHECK_THROWS_AS(integrate_cellwise(mesh, std::vector<double>(3, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("interpolation is exact on linear fields") {
    const DiscMesh mesh = build_mesh(1.0, 0.2);
    std::vector<double> v(mesh.nodes.size());
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        v[i] = 0.3 + 1.2 * mesh.nodes[i].x - 0.8 * mesh.nodes[i].y;
    }
    const ScalarField f(mesh, v);
    for (const Vec2 p : {Vec2{0.1, 0.2}, Vec2{-0.4, 0.3}, Vec2{0.0, 0.0}}) {
        CHECK(interpolate(f, p) ==
              doctest::Approx(0.3 + 1.2 * p.x - 0.8 * p.y).epsilon(1e-12));
    }
    // nodal point returns the nodal value
    const Vec2 node = mesh.nodes[17];
    CHECK(interpolate(f, node) == doctest::Approx(v[17]).epsilon(1e-12));
    // centroid of a cell is the mean of its corners
    const auto& tri = mesh.cells[5];
    const Vec2 centroid =
        (mesh.nodes[tri[0]] + mesh.nodes[tri[1]] + mesh.nodes[tri[2]]) * (1.0 / 3.0);
    CHECK(interpolate(f, centroid) ==
          doctest::Approx((v[tri[0]] + v[tri[1]] + v[tri[2]]) / 3.0).epsilon(1e-12));
    CHECK_THROWS_AS(interpolate(f, {5.0, 5.0}), std::domain_error);
}

TEST_CASE("ring flux of the closed-form field recovers minus the mass") {
    const double R = 2.0;
    const double alpha = 1.3;
    const DiscMesh mesh = build_mesh(R, R / 128.0, {{0.0, 0.0}}, 4.0);
    std::vector<double> v(mesh.nodes.size());
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        v[i] = phi_2d(alpha, std::max(mesh.nodes[i].norm(), 0.0));
    }
    const ScalarField f(mesh, v);
    for (double r : {0.8, 1.0, 1.2}) {
        const RingFlux flux = boundary_ring_flux(f, r);
        CHECK(flux.skipped == 0);
        CHECK(flux.flux == doctest::Approx(-alpha).epsilon(0.03));
    }
    // constant field: zero flux
    ScalarField c(mesh, std::vector<double>(mesh.nodes.size(), 2.0));
    CHECK(std::abs(boundary_ring_flux(c, 1.0).flux) < 1e-12);
}
