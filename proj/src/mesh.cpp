#include "hports/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <functional>
#include <numeric>
#include <set>

#include <boost/multiprecision/cpp_int.hpp>

namespace hports {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateSimplex: return "DuplicateSimplex";
    case ErrorCode::DanglingVertexIndex: return "DanglingVertexIndex";
    case ErrorCode::DegenerateSimplex: return "DegenerateSimplex";
    case ErrorCode::NonOrientable: return "NonOrientable";
    case ErrorCode::OverflowInExactArithmetic: return "OverflowInExactArithmetic";
    case ErrorCode::UnsupportedResolution: return "UnsupportedResolution";
    case ErrorCode::UnknownShape: return "UnknownShape";
    case ErrorCode::DegreeOutOfRange: return "DegreeOutOfRange";
    case ErrorCode::DegreeMismatch: return "DegreeMismatch";
    case ErrorCode::ComplexMismatch: return "ComplexMismatch";
    case ErrorCode::FactorizationFailure: return "FactorizationFailure";
    case ErrorCode::NotWellCentered: return "NotWellCentered";
    case ErrorCode::AmbiguousKernel: return "AmbiguousKernel";
    case ErrorCode::NotInHarmonicComplement: return "NotInHarmonicComplement";
    case ErrorCode::InvalidDegrees: return "InvalidDegrees";
    case ErrorCode::WrongDimension: return "WrongDimension";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

std::string_view to_string(Finding::Kind kind) {
  switch (kind) {
    case Finding::Kind::excess_cofaces: return "excess_cofaces";
    case Finding::Kind::inconsistent_orientation: return "inconsistent_orientation";
    case Finding::Kind::non_orientable: return "non_orientable";
    case Finding::Kind::non_manifold_vertex: return "non_manifold_vertex";
  }
  return "unknown";
}

namespace {

std::atomic<std::uint64_t> next_complex_id{1};

Simplex drop(const Simplex& s, std::size_t i) {
  Simplex f;
  f.reserve(s.size() - 1);
  for (std::size_t j = 0; j < s.size(); ++j)
    if (j != i) f.push_back(s[j]);
  return f;
}

int permutation_sign(const Simplex& tuple) {
  int inversions = 0;
  for (std::size_t i = 0; i < tuple.size(); ++i)
    for (std::size_t j = i + 1; j < tuple.size(); ++j)
      if (tuple[i] > tuple[j]) ++inversions;
  return inversions % 2 == 0 ? 1 : -1;
}

struct Coface {
  int top;
  int coef;  // incidence sign of the face in the sorted top simplex
};

std::map<Simplex, std::vector<Coface>> facet_cofaces(const std::vector<Simplex>& sorted_top) {
  std::map<Simplex, std::vector<Coface>> faces;
  for (int t = 0; t < static_cast<int>(sorted_top.size()); ++t) {
    const Simplex& s = sorted_top[t];
    if (s.size() < 2) continue;
    for (std::size_t i = 0; i < s.size(); ++i)
      faces[drop(s, i)].push_back({t, i % 2 == 0 ? 1 : -1});
  }
  return faces;
}

// Breadth-first orientation propagation across facets shared by exactly two
// top simplices. Seeds keep their entry in `signs`. Returns the index of a
// top simplex where a conflict was found, or -1.
int propagate_orientation(const std::vector<Simplex>& sorted_top, std::vector<int>& signs) {
  const auto faces = facet_cofaces(sorted_top);
  std::vector<std::vector<std::pair<int, int>>> adjacency(sorted_top.size());
  for (const auto& [face, cof] : faces) {
    if (cof.size() != 2) continue;
    // neighbour sign = -coefA * sA * coefB, stored as the factor -coefA*coefB
    const int factor = -cof[0].coef * cof[1].coef;
    adjacency[cof[0].top].push_back({cof[1].top, factor});
    adjacency[cof[1].top].push_back({cof[0].top, factor});
  }
  std::vector<bool> seen(sorted_top.size(), false);
  for (std::size_t seed = 0; seed < sorted_top.size(); ++seed) {
    if (seen[seed]) continue;
    seen[seed] = true;
    std::deque<int> queue{static_cast<int>(seed)};
    while (!queue.empty()) {
      const int t = queue.front();
      queue.pop_front();
      for (auto [u, factor] : adjacency[t]) {
        const int want = factor * signs[t];
        if (!seen[u]) {
          seen[u] = true;
          signs[u] = want;
          queue.push_back(u);
        } else if (signs[u] != want) {
          return u;
        }
      }
    }
  }
  return -1;
}

}  // namespace

int SimplicialComplex::count(int k) const {
  if (k < 0 || k > dimension_) return 0;
  return static_cast<int>(simplices_[k].size());
}

std::vector<int> SimplicialComplex::counts() const {
  std::vector<int> out;
  for (int k = 0; k <= dimension_; ++k) out.push_back(count(k));
  return out;
}

int SimplicialComplex::total_simplices() const {
  int total = 0;
  for (int k = 0; k <= dimension_; ++k) total += count(k);
  return total;
}

std::optional<int> SimplicialComplex::index_of(const Simplex& s) const {
  const int k = static_cast<int>(s.size()) - 1;
  if (k < 0 || k > dimension_) return std::nullopt;
  auto it = lookup_[k].find(s);
  if (it == lookup_[k].end()) return std::nullopt;
  return it->second;
}

std::vector<int> SimplicialComplex::top_coface_counts() const {
  std::vector<int> counts(count(dimension_ - 1), 0);
  if (dimension_ < 1) return counts;
  const IntSparse& b = boundary(dimension_);
  for (int col = 0; col < b.outerSize(); ++col)
    for (IntSparse::InnerIterator it(b, col); it; ++it) ++counts[it.row()];
  return counts;
}

std::vector<Simplex> SimplicialComplex::oriented_top_simplices() const {
  std::vector<Simplex> out = simplices_[dimension_];
  for (std::size_t i = 0; i < out.size(); ++i)
    if (orientation_[dimension_][i] < 0 && out[i].size() >= 2) std::swap(out[i][0], out[i][1]);
  return out;
}

SimplicialComplex make_complex(int dimension, std::vector<Simplex> sorted_top,
                               std::vector<int> top_signs, Eigen::MatrixXd coords) {
  SimplicialComplex c;
  c.dimension_ = dimension;
  c.id_ = next_complex_id.fetch_add(1);
  c.coords_ = std::move(coords);
  c.simplices_.assign(dimension + 1, {});
  c.orientation_.assign(dimension + 1, {});
  c.lookup_.assign(dimension + 1, {});
  c.simplices_[dimension] = std::move(sorted_top);
  for (int k = dimension - 1; k >= 0; --k) {
    std::set<Simplex> faces;
    for (const Simplex& s : c.simplices_[k + 1])
      for (std::size_t i = 0; i < s.size(); ++i) faces.insert(drop(s, i));
    c.simplices_[k].assign(faces.begin(), faces.end());
  }
  for (int k = 0; k <= dimension; ++k) {
    for (int i = 0; i < c.count(k); ++i) c.lookup_[k].emplace(c.simplices_[k][i], i);
    c.orientation_[k].assign(c.count(k), 1);
  }
  c.orientation_[dimension] = std::move(top_signs);

  for (int k = 1; k <= dimension; ++k) {
    std::vector<Eigen::Triplet<int>> triplets;
    for (int j = 0; j < c.count(k); ++j) {
      const Simplex& s = c.simplices_[k][j];
      const int sign = c.orientation_[k][j];
      for (std::size_t i = 0; i <= static_cast<std::size_t>(k); ++i) {
        const int row = c.lookup_[k - 1].at(drop(s, i));
        triplets.emplace_back(row, j, (i % 2 == 0 ? 1 : -1) * sign);
      }
    }
    IntSparse b(c.count(k - 1), c.count(k));
    b.setFromTriplets(triplets.begin(), triplets.end());
    b.makeCompressed();
    c.boundary_.push_back(std::move(b));
  }
  return c;
}

SimplicialComplex build_complex(const std::vector<Simplex>& top_simplices,
                                const Eigen::MatrixXd& vertex_coords, OrientationPolicy policy) {
  if (top_simplices.empty()) throw Error(ErrorCode::InvalidInput, "no top simplices given");
  const std::size_t width = top_simplices.front().size();
  if (width < 1) throw Error(ErrorCode::InvalidInput, "empty simplex");
  const int n = static_cast<int>(width) - 1;
  if (vertex_coords.rows() < n)
    throw Error(ErrorCode::InvalidInput, "ambient dimension smaller than simplex dimension");
  if (!vertex_coords.allFinite()) throw Error(ErrorCode::InvalidInput, "non-finite vertex coordinate");

  std::vector<std::pair<Simplex, int>> sorted;
  sorted.reserve(top_simplices.size());
  for (const Simplex& tuple : top_simplices) {
    if (tuple.size() != width) throw Error(ErrorCode::InvalidInput, "mixed simplex dimensions");
    for (int v : tuple)
      if (v < 0 || v >= vertex_coords.cols())
        throw Error(ErrorCode::DanglingVertexIndex, "vertex index " + std::to_string(v));
    Simplex s = tuple;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
      throw Error(ErrorCode::DegenerateSimplex, "repeated vertex in simplex");
    sorted.emplace_back(std::move(s), permutation_sign(tuple));
  }
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].first == sorted[i - 1].first)
      throw Error(ErrorCode::DuplicateSimplex, "top simplex listed twice");

  std::vector<Simplex> top;
  std::vector<int> signs;
  for (auto& [s, sign] : sorted) {
    top.push_back(std::move(s));
    signs.push_back(sign);
  }
  if (policy == OrientationPolicy::infer && propagate_orientation(top, signs) >= 0)
    throw Error(ErrorCode::NonOrientable, "no consistent orientation of top simplices exists");
  return make_complex(n, std::move(top), std::move(signs), vertex_coords);
}

IntSparse BoundaryComplex::inclusion(int k, int parent_count) const {
  IntSparse m(parent_count, static_cast<int>(parent.at(k).size()));
  std::vector<Eigen::Triplet<int>> triplets;
  for (std::size_t j = 0; j < parent[k].size(); ++j)
    triplets.emplace_back(parent[k][j], static_cast<int>(j), relative_sign[k][j]);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

BoundaryComplex extract_boundary(const SimplicialComplex& c) {
  const int n = c.dimension();
  BoundaryComplex out;
  if (n < 1) {
    out.complex = make_complex(0, {}, {}, Eigen::MatrixXd(c.ambient_dimension(), 0));
    out.parent.assign(1, {});
    out.relative_sign.assign(1, {});
    return out;
  }
  const IntSparse& b = c.boundary(n);
  std::vector<int> coface_count(c.count(n - 1), 0), induced(c.count(n - 1), 0);
  for (int col = 0; col < b.outerSize(); ++col)
    for (IntSparse::InnerIterator it(b, col); it; ++it) {
      ++coface_count[it.row()];
      induced[it.row()] = it.value();
    }

  std::vector<int> facets;
  std::set<int> used;
  for (int f = 0; f < c.count(n - 1); ++f)
    if (coface_count[f] == 1) {
      facets.push_back(f);
      for (int v : c.simplices(n - 1)[f]) used.insert(v);
    }

  // Monotone relabelling keeps sorted tuples sorted and lexicographic order intact.
  std::vector<int> to_parent(used.begin(), used.end());
  std::map<int, int> to_local;
  for (std::size_t i = 0; i < to_parent.size(); ++i) to_local[to_parent[i]] = static_cast<int>(i);
  Eigen::MatrixXd coords(c.ambient_dimension(), static_cast<Eigen::Index>(to_parent.size()));
  for (std::size_t i = 0; i < to_parent.size(); ++i) coords.col(i) = c.coordinates().col(to_parent[i]);

  std::vector<Simplex> top;
  std::vector<int> signs;
  for (int f : facets) {
    Simplex s;
    for (int v : c.simplices(n - 1)[f]) s.push_back(to_local.at(v));
    top.push_back(std::move(s));
    signs.push_back(induced[f] * c.orientation(n - 1, f));
  }
  out.complex = make_complex(n - 1, std::move(top), std::move(signs), std::move(coords));

  out.parent.assign(n, {});
  out.relative_sign.assign(n, {});
  for (int k = 0; k <= n - 1; ++k) {
    for (int j = 0; j < out.complex.count(k); ++j) {
      Simplex s;
      for (int v : out.complex.simplices(k)[j]) s.push_back(to_parent[v]);
      const int p = *c.index_of(s);
      out.parent[k].push_back(p);
      out.relative_sign[k].push_back(out.complex.orientation(k, j) * c.orientation(k, p));
    }
  }
  return out;
}

ValidationReport validate_manifold(const SimplicialComplex& c) {
  ValidationReport report;
  const int n = c.dimension();
  if (n < 1) return report;
  const IntSparse& b = c.boundary(n);
  std::vector<int> count(c.count(n - 1), 0), sum(c.count(n - 1), 0);
  for (int col = 0; col < b.outerSize(); ++col)
    for (IntSparse::InnerIterator it(b, col); it; ++it) {
      ++count[it.row()];
      sum[it.row()] += it.value();
    }
  for (int f = 0; f < c.count(n - 1); ++f) {
    if (count[f] > 2)
      report.findings.push_back({Finding::Kind::excess_cofaces, c.simplices(n - 1)[f],
                                 std::to_string(count[f]) + " cofaces"});
    else if (count[f] == 2 && sum[f] != 0)
      report.findings.push_back({Finding::Kind::inconsistent_orientation, c.simplices(n - 1)[f],
                                 "cofaces induce the same orientation"});
  }

  std::vector<int> signs(c.count(n), 1);
  const int conflict = propagate_orientation(c.simplices(n), signs);
  if (conflict >= 0)
    report.findings.push_back({Finding::Kind::non_orientable, c.simplices(n)[conflict],
                               "orientation propagation returns with the opposite sign"});

  if (n >= 2) {
    // The top simplices around each vertex must be connected through
    // manifold facets containing that vertex.
    const auto faces = facet_cofaces(c.simplices(n));
    std::map<int, std::vector<int>> star;
    for (int t = 0; t < c.count(n); ++t)
      for (int v : c.simplices(n)[t]) star[v].push_back(t);
    // Per-vertex connectivity: union only through facets containing v.
    std::map<int, std::vector<std::pair<int, int>>> links;
    for (const auto& [face, cof] : faces)
      if (cof.size() == 2)
        for (int v : face) links[v].push_back({cof[0].top, cof[1].top});
    for (const auto& [v, tops] : star) {
      std::map<int, int> local;
      for (int t : tops) local[t] = t;
      std::function<int(int)> lf = [&](int x) { return local[x] == x ? x : local[x] = lf(local[x]); };
      for (auto [a, bb] : links[v]) local[lf(a)] = lf(bb);
      std::set<int> roots;
      for (int t : tops) roots.insert(lf(t));
      if (roots.size() > 1)
        report.findings.push_back({Finding::Kind::non_manifold_vertex, Simplex{v},
                                   std::to_string(roots.size()) + " disconnected star components"});
    }
  }
  return report;
}

namespace {

using Big = boost::multiprecision::cpp_int;
struct BigEntry {
  int index;
  Big value;
};
using BigVec = std::vector<BigEntry>;

// a*x - b*y on sorted sparse vectors
BigVec combine(const Big& a, const BigVec& x, const Big& b, const BigVec& y) {
  BigVec out;
  out.reserve(x.size() + y.size());
  std::size_t i = 0, j = 0;
  while (i < x.size() || j < y.size()) {
    if (j == y.size() || (i < x.size() && x[i].index < y[j].index)) {
      out.push_back({x[i].index, a * x[i].value});
      ++i;
    } else if (i == x.size() || y[j].index < x[i].index) {
      out.push_back({y[j].index, -b * y[j].value});
      ++j;
    } else {
      Big v = a * x[i].value - b * y[j].value;
      if (v != 0) out.push_back({x[i].index, std::move(v)});
      ++i;
      ++j;
    }
  }
  return out;
}

void make_primitive(BigVec& v, unsigned max_bits) {
  if (v.empty()) return;
  Big g = 0;
  for (const auto& e : v) {
    g = boost::multiprecision::gcd(g, e.value);
    if (g == 1) break;
  }
  if (g < 0) g = -g;
  if (v.front().value < 0) g = -g;
  for (auto& e : v) {
    if (g != 1) e.value /= g;
    if (e.value != 0 && boost::multiprecision::msb(boost::multiprecision::abs(e.value)) >= max_bits)
      throw Error(ErrorCode::OverflowInExactArithmetic, "intermediate exceeds bit budget");
  }
}

}  // namespace

int exact_rank(const IntSparse& m, unsigned max_bits) {
  std::map<int, BigVec> pivots;  // leading index -> reduced vector
  int rank = 0;
  for (int col = 0; col < m.outerSize(); ++col) {
    BigVec v;
    for (IntSparse::InnerIterator it(m, col); it; ++it)
      if (it.value() != 0) v.push_back({static_cast<int>(it.row()), Big(it.value())});
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
    while (!v.empty()) {
      auto p = pivots.find(v.front().index);
      if (p == pivots.end()) {
        make_primitive(v, max_bits);
        pivots.emplace(v.front().index, std::move(v));
        ++rank;
        break;
      }
      const Big a = p->second.front().value;
      const Big b = v.front().value;
      v = combine(a, v, b, p->second);
      make_primitive(v, max_bits);
    }
  }
  return rank;
}

int float_rank(const IntSparse& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  const Eigen::MatrixXd dense = Eigen::MatrixXd(m.cast<double>());
  Eigen::BDCSVD<Eigen::MatrixXd> svd(dense);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cutoff = 1e-10 * s(0);
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff) ++r;
  return r;
}

std::vector<int> betti_numbers(const SimplicialComplex& c, RankMethod method) {
  const int n = c.dimension();
  std::vector<int> ranks(n + 2, 0);  // ranks[k] = rank boundary(k), zero outside 1..n
  for (int k = 1; k <= n; ++k)
    ranks[k] = method == RankMethod::exact ? exact_rank(c.boundary(k)) : float_rank(c.boundary(k));
  std::vector<int> betti;
  for (int k = 0; k <= n; ++k) betti.push_back(c.count(k) - ranks[k] - ranks[k + 1]);
  return betti;
}

std::vector<int> betti_numbers_with_fallback(const SimplicialComplex& c, bool* used_fallback) {
  if (used_fallback) *used_fallback = false;
  try {
    return betti_numbers(c, RankMethod::exact);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::OverflowInExactArithmetic) throw;
    if (used_fallback) *used_fallback = true;
    return betti_numbers(c, RankMethod::floating);
  }
}

int euler_characteristic(const SimplicialComplex& c) {
  int chi = 0;
  for (int k = 0; k <= c.dimension(); ++k) chi += (k % 2 == 0 ? 1 : -1) * c.count(k);
  return chi;
}

}  // namespace hports
