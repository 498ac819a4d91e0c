#include "tabletop/common/edt.hpp"

#include <limits>
#include <vector>

namespace tabletop {

namespace {

constexpr double kInf = 1e20;

// 1D squared distance transform of a sampled function f, Felzenszwalb &
// Huttenlocher: d(p) = min_q (p - q)^2 + f(q).
void dt_1d(const std::vector<double>& f, std::vector<double>& d, int n) {
  static thread_local std::vector<int> v;
  static thread_local std::vector<double> z;
  v.assign(n, 0);
  z.assign(n + 1, 0.0);
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    double s = ((f[q] + q * 1.0 * q) - (f[v[k]] + v[k] * 1.0 * v[k])) / (2.0 * q - 2.0 * v[k]);
    while (s <= z[k]) {
      --k;
      s = ((f[q] + q * 1.0 * q) - (f[v[k]] + v[k] * 1.0 * v[k])) / (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

Image<double> squared_distance_transform(const MaskImage& mask) {
  const int w = mask.width();
  const int h = mask.height();
  Image<double> out(w, h, 0.0);
  if (w == 0 || h == 0) return out;

  // columns first
  std::vector<double> f(std::max(w, h)), d(std::max(w, h));
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[y] = mask.at(x, y) ? kInf : 0.0;
    dt_1d(f, d, h);
    for (int y = 0; y < h; ++y) out.at(x, y) = d[y];
  }
  // then rows
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f[x] = out.at(x, y);
    dt_1d(f, d, w);
    for (int x = 0; x < w; ++x) out.at(x, y) = d[x];
  }
  return out;
}

}  // namespace tabletop
