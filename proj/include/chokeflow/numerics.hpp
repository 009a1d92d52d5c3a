#pragma once

#include <cmath>
#include <limits>
#include <utility>

namespace chokeflow {

struct BrentResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;  // |fx| <= f_tol
};

// Brent's bracketed root finder (inverse quadratic interpolation, secant and
// bisection). Requires fa and fb of opposite sign (or one of them zero).
// Stops once |f| <= f_tol or the bracket shrinks below x_tol. The returned
// point is the iterate with the smallest |f| seen, so for a fixed bracket and
// x_tol a tighter f_tol never yields a larger |f|.
template <class F>
BrentResult brent_root(F&& f, double a, double b, double fa, double fb, double f_tol, double x_tol,
                       int max_iter = 200) {
    BrentResult best{a, fa, 0, false};
    if (std::abs(fb) < std::abs(best.fx)) best = {b, fb, 0, false};
    if (std::abs(best.fx) <= f_tol) {
        best.converged = true;
        return best;
    }

    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int iter = 1; iter <= max_iter; ++iter) {
        if ((fb > 0.0 && fc > 0.0) || (fb < 0.0 && fc < 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * x_tol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) {
            best.iterations = iter - 1;
            return best;
        }
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qa = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
            const double min2 = std::abs(e * q);
            if (2.0 * p < std::min(min1, min2)) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol1 ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
        if (std::abs(fb) < std::abs(best.fx)) best = {b, fb, iter, false};
        best.iterations = iter;
        if (std::abs(fb) <= f_tol) {
            best.converged = true;
            return best;
        }
    }
    return best;
}

}  // namespace chokeflow
