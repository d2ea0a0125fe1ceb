#include "conefield/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace conefield {

namespace {

// QUADPACK 15-point Kronrod rule with the embedded 7-point Gauss rule.
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.0229353220105292, 0.0630920926299785, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
constexpr double kWg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694};

struct PanelResult {
    double kronrod;
    double error;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - hw * kXgk[i]);
        fv[14 - i] = f(c + hw * kXgk[i]);
    }
    fv[7] = f(c);
    double kron = kWgk[7] * fv[7];
    for (int i = 0; i < 7; ++i) kron += kWgk[i] * (fv[i] + fv[14 - i]);
    double gauss = kWg[3] * fv[7];
    for (int i = 0; i < 3; ++i) {
        const int k = 2 * i + 1;
        gauss += kWg[i] * (fv[k] + fv[14 - k]);
    }
    return {kron * hw, std::abs(kron - gauss) * hw};
}

struct Panel {
    double a, b;
    double value, error;
    int depth;
};

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, double rel_tol, int max_depth) {
    if (!(abs_tol > 0.0)) {
        throw std::invalid_argument("integrate: tolerance must be positive");
    }
    if (a == b) return 0.0;

    std::vector<Panel> stack;
    const PanelResult first = gk15(f, a, b);
    stack.push_back({a, b, first.kronrod, first.error, 0});

    double total = 0.0;
    double estimate = first.kronrod;
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        const double local_tol =
            std::max(abs_tol * (p.b - p.a) / (b - a), rel_tol * std::abs(estimate));
        if (p.error <= local_tol || p.depth >= max_depth ||
            p.b - p.a <= std::abs(p.a) * 1e-15) {
            total += p.value;
            continue;
        }
        const double m = 0.5 * (p.a + p.b);
        const PanelResult left = gk15(f, p.a, m);
        const PanelResult right = gk15(f, m, p.b);
        estimate += left.kronrod + right.kronrod - p.value;
        stack.push_back({p.a, m, left.kronrod, left.error, p.depth + 1});
        stack.push_back({m, p.b, right.kronrod, right.error, p.depth + 1});
    }
    return total;
}

}  // namespace conefield
