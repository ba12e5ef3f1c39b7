#include "aoii/numerics.hpp"

namespace aoii {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Singular: return "singular";
    case ErrorKind::RowSum: return "row-sum";
    case ErrorKind::NegativeRate: return "negative-rate";
    case ErrorKind::Reducible: return "reducible";
    case ErrorKind::TooFewStates: return "too-few-states";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::GridCap: return "grid-cap";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

Matrix remove_index(const Matrix& m, Eigen::Index k) {
  const Eigen::Index n = m.rows();
  Matrix out(n - 1, n - 1);
  for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
    if (r == k) continue;
    for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
      if (c == k) continue;
      out(rr, cc++) = m(r, c);
    }
    ++rr;
  }
  return out;
}

RowVector remove_index(const RowVector& v, Eigen::Index k) {
  RowVector out(v.size() - 1);
  out << v.head(k), v.tail(v.size() - k - 1);
  return out;
}

Vector remove_index(const Vector& v, Eigen::Index k) {
  Vector out(v.size() - 1);
  out << v.head(k), v.tail(v.size() - k - 1);
  return out;
}

}  // namespace aoii
