#pragma once

// Independent brute-force reference implementations used to cross-check the
// library. Deliberately written with plain loops and no calls into the
// library's numeric helpers, so a shared bug cannot hide.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

struct Pt {
  double x = 0.0;
  double y = 0.0;
};

inline double dist(Pt a, Pt b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

inline double bbox_max_side(const std::vector<Pt>& pts) {
  double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
  for (const Pt& p : pts) {
    if (p.x < xmin) xmin = p.x;
    if (p.x > xmax) xmax = p.x;
    if (p.y < ymin) ymin = p.y;
    if (p.y > ymax) ymax = p.y;
  }
  const double w = xmax - xmin;
  const double h = ymax - ymin;
  return w > h ? w : h;
}

/// Mirror error: back-transform the mirror detection through the symmetry
/// mapping and the horizontal flip, then average normalized distances.
inline double mirror_error(const std::vector<Pt>& det_original,
                           const std::vector<Pt>& det_mirror, double width,
                           const std::vector<std::size_t>& mapping, double s) {
  double sum = 0.0;
  for (std::size_t k = 0; k < det_original.size(); ++k) {
    const Pt back{width - det_mirror[mapping[k]].x, det_mirror[mapping[k]].y};
    sum += dist(det_original[k], back);
  }
  return sum / (static_cast<double>(det_original.size()) * s);
}

inline double alignment_error(const std::vector<Pt>& det,
                              const std::vector<Pt>& gt, double s) {
  double sum = 0.0;
  for (std::size_t k = 0; k < det.size(); ++k) sum += dist(det[k], gt[k]);
  return sum / (static_cast<double>(det.size()) * s);
}

struct PckOut {
  std::vector<double> per_point;
  double average = 0.0;
};

inline PckOut pck(const std::vector<std::vector<Pt>>& dets,
                  const std::vector<std::vector<Pt>>& gts, double alpha) {
  const std::size_t k_count = gts[0].size();
  PckOut out;
  out.per_point.assign(k_count, 0.0);
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const double threshold = alpha * bbox_max_side(gts[i]);
    for (std::size_t k = 0; k < k_count; ++k) {
      if (dist(dets[i][k], gts[i][k]) <= threshold) out.per_point[k] += 1.0;
    }
  }
  double total = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    out.per_point[k] /= static_cast<double>(dets.size());
    total += out.per_point[k];
  }
  out.average = total / static_cast<double>(k_count);
  return out;
}

/// Pearson r via the direct covariance formula (one pass of raw sums).
inline double pearson(const std::vector<double>& xs,
                      const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    syy += ys[i] * ys[i];
    sxy += xs[i] * ys[i];
  }
  const double cov = n * sxy - sx * sy;
  const double vx = n * sxx - sx * sx;
  const double vy = n * syy - sy * sy;
  return cov / std::sqrt(vx * vy);
}

/// Overlap fraction via a quadratic scan; ids may repeat across sets only if
/// the inputs were malformed, which the caller avoids.
inline double consistency(const std::vector<std::string>& s1,
                          const std::vector<std::string>& s2) {
  std::size_t common = 0;
  for (const std::string& a : s1) {
    for (const std::string& b : s2) {
      if (a == b) {
        ++common;
        break;
      }
    }
  }
  return static_cast<double>(common) / static_cast<double>(s1.size());
}

/// Top-M ids by value (descending, ties by id ascending) via selection sort.
inline std::vector<std::string> top_m(std::vector<std::string> ids,
                                      std::vector<double> values,
                                      std::size_t m) {
  std::vector<std::string> out;
  for (std::size_t round = 0; round < m; ++round) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < ids.size(); ++i) {
      if (values[i] > values[best] ||
          (values[i] == values[best] && ids[i] < ids[best]))
        best = i;
    }
    out.push_back(ids[best]);
    ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(best));
    values.erase(values.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return out;
}

/// Solve a dense linear system by Gaussian elimination with partial pivoting.
inline std::vector<double> solve(std::vector<std::vector<double>> a,
                                 std::vector<double> b) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    if (a[pivot][col] == 0.0)
      throw std::runtime_error("oracle solve: singular matrix");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
    x[i] = acc / a[i][i];
  }
  return x;
}

struct RidgeOut {
  std::vector<std::vector<double>> weights;  ///< d x m
  std::vector<double> intercept;             ///< m
};

/// Ridge regression with intercept via centering, solved through the normal
/// equations with the elimination above. X is n x d (row major), Y is n x m.
inline RidgeOut ridge(const std::vector<std::vector<double>>& x,
                      const std::vector<std::vector<double>>& y,
                      double lambda) {
  const std::size_t n = x.size();
  const std::size_t d = x[0].size();
  const std::size_t m = y[0].size();

  std::vector<double> mean_x(d, 0.0), mean_y(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) mean_x[j] += x[i][j];
    for (std::size_t j = 0; j < m; ++j) mean_y[j] += y[i][j];
  }
  for (double& v : mean_x) v /= static_cast<double>(n);
  for (double& v : mean_y) v /= static_cast<double>(n);

  // Gram = Xc' Xc + lambda I, rhs_j = Xc' Yc_j.
  std::vector<std::vector<double>> gram(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < d; ++a) {
      const double xa = x[i][a] - mean_x[a];
      for (std::size_t b = 0; b < d; ++b)
        gram[a][b] += xa * (x[i][b] - mean_x[b]);
    }
  }
  for (std::size_t a = 0; a < d; ++a) gram[a][a] += lambda;

  RidgeOut out;
  out.weights.assign(d, std::vector<double>(m, 0.0));
  out.intercept.assign(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> rhs(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double yc = y[i][j] - mean_y[j];
      for (std::size_t a = 0; a < d; ++a)
        rhs[a] += (x[i][a] - mean_x[a]) * yc;
    }
    const std::vector<double> w = solve(gram, rhs);
    double dot = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      out.weights[a][j] = w[a];
      dot += w[a] * mean_x[a];
    }
    out.intercept[j] = mean_y[j] - dot;
  }
  return out;
}

}  // namespace oracle
