#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <ostream>

namespace tabsniper {

/// Axis-aligned rectangle in page-pixel coordinates (origin top-left, y down).
/// Valid boxes satisfy x1 <= x2 and y1 <= y2; zero-area boxes are allowed.
template <std::floating_point Real>
struct BasicBox {
  Real x1{}, y1{}, x2{}, y2{};

  constexpr Real width() const { return x2 - x1; }
  constexpr Real height() const { return y2 - y1; }
  constexpr Real area() const { return width() * height(); }
  constexpr Real cx() const { return (x1 + x2) / 2; }
  constexpr Real cy() const { return (y1 + y2) / 2; }
  constexpr bool valid() const { return x1 <= x2 && y1 <= y2; }
  constexpr bool degenerate() const { return !(x2 > x1) || !(y2 > y1); }

  constexpr bool contains_point(Real x, Real y) const {
    return x >= x1 && x <= x2 && y >= y1 && y <= y2;
  }

  friend constexpr bool operator==(const BasicBox&, const BasicBox&) = default;
};

using Box = BasicBox<double>;

template <std::floating_point Real>
std::ostream& operator<<(std::ostream& os, const BasicBox<Real>& b) {
  return os << '(' << b.x1 << ',' << b.y1 << ',' << b.x2 << ',' << b.y2 << ')';
}

template <std::floating_point Real>
constexpr Real intersection_area(const BasicBox<Real>& a, const BasicBox<Real>& b) {
  const Real w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const Real h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  return (w > 0 && h > 0) ? w * h : Real(0);
}

/// Intersection box; empty intersections collapse to a zero-area box.
template <std::floating_point Real>
constexpr BasicBox<Real> intersect(const BasicBox<Real>& a, const BasicBox<Real>& b) {
  BasicBox<Real> r{std::max(a.x1, b.x1), std::max(a.y1, b.y1), std::min(a.x2, b.x2),
                   std::min(a.y2, b.y2)};
  if (r.x2 < r.x1) r.x2 = r.x1;
  if (r.y2 < r.y1) r.y2 = r.y1;
  return r;
}

/// Smallest box covering both inputs.
template <std::floating_point Real>
constexpr BasicBox<Real> enclosing(const BasicBox<Real>& a, const BasicBox<Real>& b) {
  return {std::min(a.x1, b.x1), std::min(a.y1, b.y1), std::max(a.x2, b.x2),
          std::max(a.y2, b.y2)};
}

template <std::floating_point Real>
constexpr Real union_area(const BasicBox<Real>& a, const BasicBox<Real>& b) {
  return a.area() + b.area() - intersection_area(a, b);
}

/// |a ∩ b| / |a ∪ b|, 0 when the union is empty.
template <std::floating_point Real>
constexpr Real iou(const BasicBox<Real>& a, const BasicBox<Real>& b) {
  const Real inter = intersection_area(a, b);
  const Real uni = a.area() + b.area() - inter;
  if (!(uni > 0)) return Real(0);
  return std::clamp(inter / uni, Real(0), Real(1));
}

/// Fraction of `inner`'s area lying inside `outer`. Zero-area `inner` yields 0.
template <std::floating_point Real>
constexpr Real containment(const BasicBox<Real>& inner, const BasicBox<Real>& outer) {
  const Real a = inner.area();
  if (!(a > 0)) return Real(0);
  return intersection_area(inner, outer) / a;
}

/// 1-D IoU of two closed intervals.
template <std::floating_point Real>
constexpr Real interval_iou(Real a1, Real a2, Real b1, Real b2) {
  const Real inter = std::max(Real(0), std::min(a2, b2) - std::max(a1, b1));
  const Real uni = (a2 - a1) + (b2 - b1) - inter;
  return uni > 0 ? inter / uni : Real(0);
}

template <std::floating_point Real>
constexpr BasicBox<Real> clamp_to(const BasicBox<Real>& b, Real width, Real height) {
  auto cl = [](Real v, Real hi) { return std::clamp(v, Real(0), hi); };
  return {cl(b.x1, width), cl(b.y1, height), cl(b.x2, width), cl(b.y2, height)};
}

template <std::floating_point Real>
constexpr BasicBox<Real> translate(const BasicBox<Real>& b, Real dx, Real dy) {
  return {b.x1 + dx, b.y1 + dy, b.x2 + dx, b.y2 + dy};
}

/// Grow a box by `pixels` on every side.
template <std::floating_point Real>
constexpr BasicBox<Real> pad(const BasicBox<Real>& b, Real pixels) {
  return {b.x1 - pixels, b.y1 - pixels, b.x2 + pixels, b.y2 + pixels};
}

}  // namespace tabsniper
