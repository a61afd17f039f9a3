#include "heis/algebra.hpp"

#include <cmath>
#include <stdexcept>

namespace heis {

namespace {

void require_same_n(int a, int b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string("dimension mismatch in ") + what);
}

// l on quotient coordinates (x_1, y_1, ..., x_n, y_n).
double l_quot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; 2 * i + 1 < a.size(); ++i) {
    s += a(2 * i) * b(2 * i + 1) - a(2 * i + 1) * b(2 * i);
  }
  return s;
}

// Row vector phi with phi . w = l(q, w) for quotient vectors.
Vec l_functional(const Vec& q) {
  Vec phi = Vec::Zero(q.size());
  for (int i = 0; 2 * i + 1 < q.size(); ++i) {
    phi(2 * i) = -q(2 * i + 1);
    phi(2 * i + 1) = q(2 * i);
  }
  return phi;
}

Vec quotient_part(const Vec& flat) { return flat.head(flat.size() - 1); }

}  // namespace

AlgebraElement::AlgebraElement(int n_, Vec x_, Vec y_, double z_)
    : n(n_), x(std::move(x_)), y(std::move(y_)), z(z_) {
  if (x.size() != n || y.size() != n) {
    throw std::invalid_argument("AlgebraElement: coordinate length != n");
  }
}

AlgebraElement AlgebraElement::zero(int n) {
  return AlgebraElement(n, Vec::Zero(n), Vec::Zero(n), 0.0);
}

AlgebraElement AlgebraElement::basis_x(int n, int i) {
  AlgebraElement a = zero(n);
  a.x(i) = 1.0;
  return a;
}

AlgebraElement AlgebraElement::basis_y(int n, int i) {
  AlgebraElement a = zero(n);
  a.y(i) = 1.0;
  return a;
}

AlgebraElement AlgebraElement::basis_z(int n) {
  AlgebraElement a = zero(n);
  a.z = 1.0;
  return a;
}

AlgebraElement AlgebraElement::from_flat(const Vec& v) {
  const int n = static_cast<int>((v.size() - 1) / 2);
  AlgebraElement a = zero(n);
  for (int i = 0; i < n; ++i) {
    a.x(i) = v(2 * i);
    a.y(i) = v(2 * i + 1);
  }
  a.z = v(2 * n);
  return a;
}

Vec AlgebraElement::flat() const {
  Vec v(2 * n + 1);
  for (int i = 0; i < n; ++i) {
    v(2 * i) = x(i);
    v(2 * i + 1) = y(i);
  }
  v(2 * n) = z;
  return v;
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& o) const {
  require_same_n(n, o.n, "operator+");
  return AlgebraElement(n, x + o.x, y + o.y, z + o.z);
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& o) const {
  require_same_n(n, o.n, "operator-");
  return AlgebraElement(n, x - o.x, y - o.y, z - o.z);
}

AlgebraElement AlgebraElement::operator*(double s) const {
  return AlgebraElement(n, s * x, s * y, s * z);
}

GroupElement::GroupElement(int n_, Vec x_, Vec y_, double z_)
    : n(n_), x(std::move(x_)), y(std::move(y_)), z(z_) {
  if (x.size() != n || y.size() != n) {
    throw std::invalid_argument("GroupElement: coordinate length != n");
  }
}

GroupElement GroupElement::identity(int n) {
  return GroupElement(n, Vec::Zero(n), Vec::Zero(n), 0.0);
}

GroupElement GroupElement::from_flat(const Vec& v) {
  const int n = static_cast<int>((v.size() - 1) / 2);
  GroupElement g = identity(n);
  for (int i = 0; i < n; ++i) {
    g.x(i) = v(2 * i);
    g.y(i) = v(2 * i + 1);
  }
  g.z = v(2 * n);
  return g;
}

Vec GroupElement::flat() const {
  Vec v(2 * n + 1);
  for (int i = 0; i < n; ++i) {
    v(2 * i) = x(i);
    v(2 * i + 1) = y(i);
  }
  v(2 * n) = z;
  return v;
}

AlgebraElement bracket(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_n(a.n, b.n, "bracket");
  AlgebraElement c = AlgebraElement::zero(a.n);
  c.z = a.x.dot(b.y) - a.y.dot(b.x);
  return c;
}

double symplectic_form(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_n(a.n, b.n, "symplectic_form");
  return a.x.dot(b.y) - a.y.dot(b.x);
}

GroupElement group_exp(const AlgebraElement& a) {
  return GroupElement(a.n, a.x, a.y, a.z + 0.5 * a.x.dot(a.y));
}

AlgebraElement group_log(const GroupElement& g) {
  return AlgebraElement(g.n, g.x, g.y, g.z - 0.5 * g.x.dot(g.y));
}

GroupElement group_multiply(const GroupElement& g, const GroupElement& h) {
  require_same_n(g.n, h.n, "group_multiply");
  return GroupElement(g.n, g.x + h.x, g.y + h.y, g.z + h.z + g.y.dot(h.x));
}

GroupElement group_inverse(const GroupElement& g) {
  return GroupElement(g.n, -g.x, -g.y, -g.z + g.y.dot(g.x));
}

SymplecticFrame SymplecticFrame::canonical(int n) {
  SymplecticFrame f;
  f.n = n;
  f.columns = Mat::Identity(2 * n + 1, 2 * n + 1);
  f.zscale = 1.0;
  return f;
}

SymplecticFrame SymplecticFrame::from_columns(Mat cols) {
  SymplecticFrame f;
  f.n = static_cast<int>((cols.rows() - 1) / 2);
  f.zscale = cols(cols.rows() - 1, cols.cols() - 1);
  f.columns = std::move(cols);
  return f;
}

AlgebraElement SymplecticFrame::column_element(int k) const {
  return AlgebraElement::from_flat(columns.col(k));
}

Vec SymplecticFrame::to_frame(const Vec& canonical_coords) const {
  return columns.colPivHouseholderQr().solve(canonical_coords);
}

Vec SymplecticFrame::from_frame(const Vec& frame_coords) const {
  return columns * frame_coords;
}

SymplecticFrame SymplecticFrame::compose(const SymplecticFrame& other) const {
  return from_columns(columns * other.columns);
}

bool is_symplectic_frame(const SymplecticFrame& f, double tol) {
  const int dim = 2 * f.n + 1;
  if (f.columns.rows() != dim || f.columns.cols() != dim) return false;
  if (numerical_rank(f.columns, tol) != dim) return false;

  // Z' must be central and match zscale.
  const Vec zcol = f.columns.col(dim - 1);
  const double zs = zcol(dim - 1);
  if (quotient_part(zcol).norm() > tol * std::max(1.0, zcol.norm())) return false;
  if (std::abs(zs - f.zscale) > tol * std::max(1.0, std::abs(zs))) return false;

  for (int j = 0; j < dim; ++j) {
    for (int k = j + 1; k < dim; ++k) {
      const double l = l_quot(quotient_part(f.columns.col(j)), quotient_part(f.columns.col(k)));
      const bool is_pair = (k == j + 1) && (j % 2 == 0) && (j + 1 < dim - 1);
      const double expected = is_pair ? zs : 0.0;
      const double scale =
          std::max(1.0, f.columns.col(j).norm() * f.columns.col(k).norm());
      if (std::abs(l - expected) > tol * scale) return false;
    }
  }
  return true;
}

SymplecticFrame complete_symplectic_frame(
    const std::vector<std::pair<AlgebraElement, AlgebraElement>>& pairs,
    const std::vector<AlgebraElement>& singles, double zscale, double tol) {
  int n = -1;
  for (const auto& [u, v] : pairs) {
    if (n < 0) n = u.n;
    require_same_n(u.n, n, "complete_symplectic_frame");
    require_same_n(v.n, n, "complete_symplectic_frame");
  }
  for (const auto& s : singles) {
    if (n < 0) n = s.n;
    require_same_n(s.n, n, "complete_symplectic_frame");
  }
  if (n < 0) throw std::invalid_argument("complete_symplectic_frame: no input elements");
  if (std::abs(zscale) <= tol) {
    throw std::invalid_argument("complete_symplectic_frame: zscale must be nonzero");
  }
  const int placed = static_cast<int>(pairs.size() + singles.size());
  if (placed > n) {
    throw std::invalid_argument("complete_symplectic_frame: more elements than pairs available");
  }

  // Working lists of flat vectors.
  std::vector<Vec> us, vs;  // completed pairs
  for (const auto& [u, v] : pairs) {
    const double l = symplectic_form(u, v);
    if (std::abs(l - zscale) > tol * std::max(1.0, std::abs(zscale))) {
      throw std::invalid_argument("complete_symplectic_frame: pair bracket != zscale");
    }
    us.push_back(u.flat());
    vs.push_back(v.flat());
  }

  // Cross brackets among the given elements must vanish (except within pairs).
  std::vector<Vec> given;
  for (const auto& [u, v] : pairs) {
    given.push_back(u.flat());
    given.push_back(v.flat());
  }
  for (const auto& s : singles) given.push_back(s.flat());
  for (size_t a = 0; a < given.size(); ++a) {
    for (size_t b = a + 1; b < given.size(); ++b) {
      const bool same_pair = a / 2 == b / 2 && a < 2 * pairs.size() && b < 2 * pairs.size();
      if (same_pair) continue;
      const double l = l_quot(quotient_part(given[a]), quotient_part(given[b]));
      if (std::abs(l) > tol * std::max(1.0, given[a].norm() * given[b].norm())) {
        throw std::invalid_argument("complete_symplectic_frame: given elements do not commute");
      }
    }
  }

  // Independence mod center of all given elements.
  {
    Mat quots(2 * n, given.size());
    for (size_t a = 0; a < given.size(); ++a) quots.col(a) = quotient_part(given[a]);
    if (numerical_rank(quots, tol) != static_cast<int>(given.size())) {
      throw std::invalid_argument(
          "complete_symplectic_frame: elements dependent modulo the center");
    }
  }

  // Partners for the singles: solve l(s_i, w_j) = zscale * delta_ij together
  // with l-orthogonality to all already placed pair elements.
  const int m = static_cast<int>(singles.size());
  std::vector<Vec> partners;
  if (m > 0) {
    const int rows = m + 2 * static_cast<int>(us.size());
    Mat A(rows, 2 * n);
    for (int i = 0; i < m; ++i) {
      A.row(i) = l_functional(quotient_part(singles[i].flat())).transpose();
    }
    for (size_t k = 0; k < us.size(); ++k) {
      A.row(m + 2 * k) = l_functional(quotient_part(us[k])).transpose();
      A.row(m + 2 * k + 1) = l_functional(quotient_part(vs[k])).transpose();
    }
    Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    for (int j = 0; j < m; ++j) {
      Vec rhs = Vec::Zero(rows);
      rhs(j) = zscale;
      const Vec wq = svd.solve(rhs);
      if ((A * wq - rhs).norm() > tol * std::max(1.0, rhs.norm()) * 1e3) {
        throw std::invalid_argument("complete_symplectic_frame: partner system infeasible");
      }
      Vec w = Vec::Zero(2 * n + 1);
      w.head(2 * n) = wq;
      partners.push_back(w);
    }
    // Make the partners commute with each other; adding multiples of the
    // singles does not disturb the constraints already satisfied.
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < j; ++i) {
        const double l = l_quot(quotient_part(partners[i]), quotient_part(partners[j]));
        partners[j] += (l / zscale) * singles[i].flat();
      }
    }
    for (int j = 0; j < m; ++j) {
      us.push_back(singles[j].flat());
      vs.push_back(partners[j]);
    }
  }

  // Complete the remaining pairs from the canonical basis, projecting off the
  // placed pairs and picking greatest-|l| pivots.
  std::vector<Vec> pool;
  for (int i = 0; i < 2 * n; ++i) {
    Vec e = Vec::Zero(2 * n + 1);
    e(i) = 1.0;
    pool.push_back(e);
  }
  auto project = [&](Vec w) {
    for (size_t k = 0; k < us.size(); ++k) {
      const double a = l_quot(quotient_part(w), quotient_part(vs[k])) / zscale;
      const double b = l_quot(quotient_part(us[k]), quotient_part(w)) / zscale;
      w -= a * us[k] + b * vs[k];
    }
    return w;
  };
  while (static_cast<int>(us.size()) < n) {
    std::vector<Vec> projected;
    projected.reserve(pool.size());
    for (const auto& w : pool) projected.push_back(project(w));
    int best_u = -1;
    double best_norm = tol;
    for (size_t i = 0; i < projected.size(); ++i) {
      const double nn = quotient_part(projected[i]).norm();
      if (nn > best_norm) {
        best_norm = nn;
        best_u = static_cast<int>(i);
      }
    }
    if (best_u < 0) {
      throw std::invalid_argument("complete_symplectic_frame: cannot extend basis");
    }
    const Vec u = projected[best_u];
    int best_v = -1;
    double best_l = tol * std::max(1.0, u.norm());
    for (size_t i = 0; i < projected.size(); ++i) {
      const double l = std::abs(l_quot(quotient_part(u), quotient_part(projected[i])));
      if (l > best_l) {
        best_l = l;
        best_v = static_cast<int>(i);
      }
    }
    if (best_v < 0) {
      throw std::invalid_argument("complete_symplectic_frame: degenerate pairing");
    }
    Vec v = projected[best_v];
    v *= zscale / l_quot(quotient_part(u), quotient_part(v));
    us.push_back(u);
    vs.push_back(v);
  }

  Mat cols(2 * n + 1, 2 * n + 1);
  for (int i = 0; i < n; ++i) {
    cols.col(2 * i) = us[i];
    cols.col(2 * i + 1) = vs[i];
  }
  cols.col(2 * n) = Vec::Zero(2 * n + 1);
  cols(2 * n, 2 * n) = zscale;

  SymplecticFrame frame = SymplecticFrame::from_columns(std::move(cols));
  if (!is_symplectic_frame(frame, std::max(tol * 1e3, 1e-12))) {
    throw std::logic_error("complete_symplectic_frame: produced frame failed verification");
  }
  return frame;
}

SymplecticFrame complete_symplectic_basis(const std::vector<AlgebraElement>& partial,
                                          CompletionMode mode, double tol) {
  switch (mode) {
    case CompletionMode::kSingle: {
      if (partial.size() != 1) {
        throw std::invalid_argument("mode 1 expects exactly one element");
      }
      const AlgebraElement& a = partial[0];
      if (quotient_part(a.flat()).norm() <= tol * std::max(1.0, std::abs(a.z))) {
        throw std::invalid_argument("mode 1: element lies in the derived algebra");
      }
      return complete_symplectic_frame({}, {a}, 1.0, tol);
    }
    case CompletionMode::kPair: {
      if (partial.size() != 2) {
        throw std::invalid_argument("mode 2 expects exactly two elements");
      }
      const double c = symplectic_form(partial[0], partial[1]);
      if (std::abs(c) <= tol * std::max(1.0, partial[0].flat().norm() *
                                                 partial[1].flat().norm())) {
        throw std::invalid_argument("mode 2: [X, Y] = 0");
      }
      return complete_symplectic_frame({{partial[0], partial[1]}}, {}, c, tol);
    }
    case CompletionMode::kCommuting: {
      if (partial.empty()) throw std::invalid_argument("mode 3 expects at least one element");
      return complete_symplectic_frame({}, partial, 1.0, tol);
    }
  }
  throw std::invalid_argument("unknown completion mode");
}

bool is_automorphism(const Mat& P, double tol) {
  const int dim = static_cast<int>(P.rows());
  if (P.cols() != dim || dim % 2 != 1) return false;
  if (numerical_rank(P, tol) != dim) return false;
  const Vec pz = P.col(dim - 1);
  for (int j = 0; j < dim; ++j) {
    for (int k = j + 1; k < dim; ++k) {
      // [P e_j, P e_k] compared against P [e_j, e_k].
      const double l = l_quot(quotient_part(P.col(j)), quotient_part(P.col(k)));
      const bool is_pair = (k == j + 1) && (j % 2 == 0) && (j + 1 < dim - 1);
      const double scale = std::max(1.0, P.col(j).norm() * P.col(k).norm());
      const Vec lhs = [&] {
        Vec v = Vec::Zero(dim);
        v(dim - 1) = l;
        return v;
      }();
      const Vec rhs = is_pair ? pz : Vec::Zero(dim);
      if ((lhs - rhs).norm() > tol * scale) return false;
    }
  }
  return true;
}

}  // namespace heis
