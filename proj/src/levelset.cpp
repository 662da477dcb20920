#include "latincut/levelset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "latincut/error.hpp"
#include "latincut/format.hpp"

namespace latincut {

LevelSetFunction LevelSetFunction::ellipse(double a, double b, double r, Vec2 center) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorKind::InvalidGeometry, "ellipse axes must be positive");
  return {Kind::Ellipse, {a, b, r, center.x, center.y}, {}};
}

LevelSetFunction LevelSetFunction::circle(Vec2 center, double r) {
  return {Kind::Circle, {center.x, center.y, r}, {}};
}

LevelSetFunction LevelSetFunction::halfplane(double c, double gx, double gy) {
  if (gx == 0.0 && gy == 0.0) throw Error(ErrorKind::InvalidGeometry, "halfplane with zero gradient");
  return {Kind::HalfPlane, {c, gx, gy}, {}};
}

LevelSetFunction LevelSetFunction::min_union(std::vector<LevelSetFunction> children) {
  if (children.empty()) throw Error(ErrorKind::InvalidGeometry, "min-union of no level sets");
  return {Kind::MinUnion, {}, std::move(children)};
}

double LevelSetFunction::operator()(const Vec2& p) const {
  switch (kind_) {
    case Kind::Ellipse: {
      const double u = (p.x - params_[3]) / params_[0];
      const double v = (p.y - params_[4]) / params_[1];
      return std::sqrt(u * u + v * v) - params_[2];
    }
    case Kind::Circle:
      return std::hypot(p.x - params_[0], p.y - params_[1]) - params_[2];
    case Kind::HalfPlane:
      return params_[0] + params_[1] * p.x + params_[2] * p.y;
    case Kind::MinUnion: {
      double m = std::numeric_limits<double>::infinity();
      for (const auto& c : children_) m = std::min(m, c(p));
      return m;
    }
  }
  return 0.0;
}

std::string LevelSetFunction::to_string() const {
  std::string out;
  switch (kind_) {
    case Kind::Ellipse: out = "ellipse("; break;
    case Kind::Circle: out = "circle("; break;
    case Kind::HalfPlane: out = "halfplane("; break;
    case Kind::MinUnion: out = "min("; break;
  }
  bool first = true;
  for (double v : params_) {
    if (!first) out += ", ";
    out += format_double(v);
    first = false;
  }
  for (const auto& c : children_) {
    if (!first) out += ", ";
    out += c.to_string();
    first = false;
  }
  out += ")";
  return out;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  LevelSetFunction parse_all() {
    auto fn = parse_function();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters");
    return fn;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::Parse, "level set '" + std::string(text_) + "': " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string_view identifier() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '-'))
      ++pos_;
    return text_.substr(start, pos_ - start);
  }

  double number() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    const auto value = parse_double(text_.substr(start, pos_ - start));
    if (!value) fail("bad number '" + std::string(text_.substr(start, pos_ - start)) + "'");
    return *value;
  }

  std::vector<double> numbers(std::size_t expected) {
    std::vector<double> out;
    for (std::size_t i = 0; i < expected; ++i) {
      if (i > 0 && !consume(',')) fail("expected ','");
      out.push_back(number());
    }
    if (!consume(')')) fail("expected ')'");
    return out;
  }

  LevelSetFunction parse_function() {
    const std::string name(identifier());
    if (!consume('(')) fail("expected '(' after '" + name + "'");
    if (name == "ellipse") {
      const auto p = numbers(5);
      return LevelSetFunction::ellipse(p[0], p[1], p[2], {p[3], p[4]});
    }
    if (name == "circle") {
      const auto p = numbers(3);
      return LevelSetFunction::circle({p[0], p[1]}, p[2]);
    }
    if (name == "halfplane") {
      const auto p = numbers(3);
      return LevelSetFunction::halfplane(p[0], p[1], p[2]);
    }
    if (name == "min") {
      std::vector<LevelSetFunction> children;
      do {
        children.push_back(parse_function());
      } while (consume(','));
      if (!consume(')')) fail("expected ')'");
      return LevelSetFunction::min_union(std::move(children));
    }
    fail("unknown level set kind '" + name + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

LevelSetFunction LevelSetFunction::parse(std::string_view text) { return Parser(text).parse_all(); }

DiscreteLevelSet::DiscreteLevelSet(std::shared_ptr<const TriMesh> mesh, std::vector<double> nodal_values)
    : mesh_(std::move(mesh)), values_(std::move(nodal_values)) {
  if (values_.size() != mesh_->num_vertices()) {
    throw Error(ErrorKind::Dimension, "level set needs one value per mesh vertex");
  }
  const double eps = 1e-12 * mesh_->h();
  perturbed_ = values_;
  for (double& v : perturbed_) {
    if (std::abs(v) < eps) v = eps;
  }
}

double DiscreteLevelSet::value_in(int t, const Vec2& p) const {
  const auto b = barycentric(mesh_->corners(t), p);
  const auto& tri = mesh_->triangle(t);
  return b[0] * perturbed_[tri[0]] + b[1] * perturbed_[tri[1]] + b[2] * perturbed_[tri[2]];
}

Vec2 DiscreteLevelSet::gradient(int t) const {
  const auto c = mesh_->corners(t);
  const auto& tri = mesh_->triangle(t);
  const double det = signed_area2(c[0], c[1], c[2]);
  const Vec2 e1 = c[1] - c[0];
  const Vec2 e2 = c[2] - c[0];
  const double d1 = perturbed_[tri[1]] - perturbed_[tri[0]];
  const double d2 = perturbed_[tri[2]] - perturbed_[tri[0]];
  // Solve [e1; e2] g = [d1; d2].
  return {(d1 * e2.y - d2 * e1.y) / det, (e1.x * d2 - e2.x * d1) / det};
}

DiscreteLevelSet interpolate_levelset(const LevelSetFunction& fn, std::shared_ptr<const TriMesh> mesh) {
  std::vector<double> values;
  values.reserve(mesh->num_vertices());
  for (const Vec2& v : mesh->vertices()) values.push_back(fn(v));
  return DiscreteLevelSet(std::move(mesh), std::move(values));
}

}  // namespace latincut
