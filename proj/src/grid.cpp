#include "crease/grid.hpp"

#include <cmath>

#include "crease/parallel.hpp"

namespace crease {

namespace {

// Mirror extension with edge repeat: -1 -> 0, -2 -> 1, n -> n-1, ...
inline int mirror_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n;
    i %= period;
    if (i < 0) i += period;
    if (i >= n) i = period - 1 - i;
    return i;
}

void convolve_line(const double* src, double* dst, int n, const std::vector<double>& k) {
    const int r = static_cast<int>(k.size()) / 2;
    // Padded copy so the inner loop needs no index folding.
    static thread_local std::vector<double> buf;
    buf.resize(static_cast<std::size_t>(n) + 2 * r);
    for (int i = 0; i < r; ++i) buf[i] = src[mirror_index(i - r, n)];
    for (int i = 0; i < n; ++i) buf[r + i] = src[i];
    for (int i = 0; i < r; ++i) buf[r + n + i] = src[mirror_index(n + i, n)];
    const double w0 = k[r];
    for (int i = 0; i < n; ++i) {
        const double* c = buf.data() + r + i;
        double acc = w0 * c[0];
        for (int j = 1; j <= r; ++j) acc += k[r + j] * (c[-j] + c[j]);
        dst[i] = acc;
    }
}

} // namespace

std::vector<double> gaussian_kernel(double sigma) {
    if (!std::isfinite(sigma) || sigma < 0.0)
        throw parameter_error("gaussian sigma must be finite and non-negative");
    const int r = static_cast<int>(std::ceil(4.0 * sigma));
    std::vector<double> k(2 * r + 1);
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        k[i + r] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;
    return k;
}

ScalarField2D gaussian_smooth(const ScalarField2D& u, double sigma) {
    if (!std::isfinite(sigma) || sigma < 0.0)
        throw parameter_error("gaussian sigma must be finite and non-negative");
    if (sigma == 0.0) return u;
    const std::vector<double> k = gaussian_kernel(sigma);

    ScalarField2D tmp = u;
    parallel_rows(u.height, [&](int y) {
        convolve_line(u.data.data() + u.idx(0, y), tmp.data.data() + tmp.idx(0, y), u.width, k);
    });

    ScalarField2D out = tmp;
    parallel_for(0, u.width, [&](int x0, int x1) {
        std::vector<double> col(u.height), res(u.height);
        for (int x = x0; x < x1; ++x) {
            for (int y = 0; y < u.height; ++y) col[y] = tmp.at(x, y);
            convolve_line(col.data(), res.data(), u.height, k);
            for (int y = 0; y < u.height; ++y) out.at(x, y) = res[y];
        }
    });
    return out;
}

GradientField gradient(const ScalarField2D& u) {
    GradientField g{ScalarField2D(u.width, u.height, 0.0, u.dx, u.dy),
                    ScalarField2D(u.width, u.height, 0.0, u.dx, u.dy)};
    const double ix2 = 1.0 / (2.0 * u.dx), iy2 = 1.0 / (2.0 * u.dy);
    const double ix = 1.0 / u.dx, iy = 1.0 / u.dy;
    parallel_rows(u.height, [&](int y) {
        for (int x = 0; x < u.width; ++x) {
            double gx;
            if (u.width == 1) gx = 0.0;
            else if (x == 0) gx = (u.at(1, y) - u.at(0, y)) * ix;
            else if (x == u.width - 1) gx = (u.at(x, y) - u.at(x - 1, y)) * ix;
            else gx = (u.at(x + 1, y) - u.at(x - 1, y)) * ix2;
            double gy;
            if (u.height == 1) gy = 0.0;
            else if (y == 0) gy = (u.at(x, 1) - u.at(x, 0)) * iy;
            else if (y == u.height - 1) gy = (u.at(x, y) - u.at(x, y - 1)) * iy;
            else gy = (u.at(x, y + 1) - u.at(x, y - 1)) * iy2;
            g.gx.at(x, y) = gx;
            g.gy.at(x, y) = gy;
        }
    });
    return g;
}

HessianField hessian(const ScalarField2D& u) {
    if (u.width < 3 || u.height < 3)
        throw parameter_error("hessian needs a grid of at least 3x3 pixels");
    HessianField h{ScalarField2D(u.width, u.height, 0.0, u.dx, u.dy),
                   ScalarField2D(u.width, u.height, 0.0, u.dx, u.dy),
                   ScalarField2D(u.width, u.height, 0.0, u.dx, u.dy)};
    const double ixx = 1.0 / (u.dx * u.dx);
    const double iyy = 1.0 / (u.dy * u.dy);
    const double ixy = 1.0 / (4.0 * u.dx * u.dy);
    parallel_rows(u.height, [&](int y) {
        for (int x = 0; x < u.width; ++x) {
            if (fits_xx(x, y, u.width, u.height))
                h.xx.at(x, y) = (u.at(x - 1, y) - 2.0 * u.at(x, y) + u.at(x + 1, y)) * ixx;
            if (fits_yy(x, y, u.width, u.height))
                h.yy.at(x, y) = (u.at(x, y - 1) - 2.0 * u.at(x, y) + u.at(x, y + 1)) * iyy;
            if (fits_xy(x, y, u.width, u.height))
                h.xy.at(x, y) = (u.at(x - 1, y - 1) + u.at(x + 1, y + 1)
                                 - u.at(x - 1, y + 1) - u.at(x + 1, y - 1)) * ixy;
        }
    });
    return h;
}

ScalarField2D second_derivative_adjoint(const ScalarField2D& txx, const ScalarField2D& txy,
                                        const ScalarField2D& tyx, const ScalarField2D& tyy) {
    if (!txx.same_dims(txy) || !txx.same_dims(tyx) || !txx.same_dims(tyy))
        throw parameter_error("adjoint inputs must share dimensions");
    const int w = txx.width, h = txx.height;
    ScalarField2D out(w, h, 0.0, txx.dx, txx.dy);
    const double ixx = 1.0 / (txx.dx * txx.dx);
    const double iyy = 1.0 / (txx.dy * txx.dy);
    const double ixy = 1.0 / (4.0 * txx.dx * txx.dy);
    // Gather formulation of the scatter adjoint; contributions come only
    // from source pixels whose stencil fits.
    parallel_rows(h, [&](int y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            if (fits_xx(x, y, w, h)) acc += -2.0 * ixx * txx.at(x, y);
            if (x >= 2) acc += ixx * txx.at(x - 1, y);
            if (x + 2 <= w - 1) acc += ixx * txx.at(x + 1, y);
            if (fits_yy(x, y, w, h)) acc += -2.0 * iyy * tyy.at(x, y);
            if (y >= 2) acc += iyy * tyy.at(x, y - 1);
            if (y + 2 <= h - 1) acc += iyy * tyy.at(x, y + 1);
            for (int sy = -1; sy <= 1; sy += 2)
                for (int sx = -1; sx <= 1; sx += 2) {
                    const int qx = x - sx, qy = y - sy;
                    if (qx < 0 || qx >= w || qy < 0 || qy >= h) continue;
                    if (!fits_xy(qx, qy, w, h)) continue;
                    acc += sx * sy * ixy * (txy.at(qx, qy) + tyx.at(qx, qy));
                }
            out.at(x, y) = acc;
        }
    });
    return out;
}

} // namespace crease
