#include "tvprox/haar_frame.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tvprox/error.hpp"
#include "tvprox/kernels.hpp"

namespace tvprox {
namespace {

// A circular shift along one axis decomposes into two contiguous runs per
// line: the bulk (extent - 1 samples) and the single wrapped sample.
struct Segment {
  std::size_t dst;
  std::size_t nb;
  std::size_t len;
};

enum class Neighbor { next, prev };

template <class F>
void for_each_segment(const NdSignal::Shape& shape, std::size_t axis, Neighbor dir, F&& f) {
  std::size_t stride = 1;
  for (std::size_t k = axis + 1; k < shape.size(); ++k) stride *= shape[k];
  const std::size_t extent = shape[axis];
  const std::size_t line = extent * stride;
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  const std::size_t last = (extent - 1) * stride;
  for (std::size_t base = 0; base < n; base += line) {
    if (dir == Neighbor::next) {
      f(Segment{base, base + stride, last});
      f(Segment{base + last, base, stride});
    } else {
      f(Segment{base + stride, base, last});
      f(Segment{base, base + last, stride});
    }
  }
}

void check_axis(const NdSignal& x, std::size_t axis, const char* what) {
  if (axis >= x.dims())
    throw std::invalid_argument(std::string(what) + ": invalid axis " + std::to_string(axis) +
                                " for a " + std::to_string(x.dims()) + "-d signal");
}

std::size_t product(const NdSignal::Shape& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return n;
}

NdSignal shifted_combine(const NdSignal& x, std::size_t axis, Neighbor dir, double sign,
                         const char* what) {
  require_frame_shape(x, what);
  check_axis(x, axis, what);
  NdSignal out = NdSignal::zeros_like(x);
  const auto& k = kernels::active();
  for_each_segment(x.shape(), axis, dir, [&](Segment s) {
    k.combine(x.data() + s.dst, x.data() + s.nb, out.data() + s.dst, s.len, 1.0, sign);
  });
  return out;
}

}  // namespace

void require_frame_shape(const NdSignal& x, const char* what) {
  for (std::size_t e : x.shape())
    if (e < 2)
      throw ShapeError(std::string(what) + ": every extent must be >= 2, got shape " +
                       shape_string(x.shape()));
}

NdSignal avg_axis(const NdSignal& x, std::size_t axis) {
  return shifted_combine(x, axis, Neighbor::next, 1.0, "avg_axis");
}

NdSignal diff_axis(const NdSignal& x, std::size_t axis) {
  return shifted_combine(x, axis, Neighbor::next, -1.0, "diff_axis");
}

NdSignal avg_axis_adjoint(const NdSignal& t, std::size_t axis) {
  return shifted_combine(t, axis, Neighbor::prev, 1.0, "avg_axis_adjoint");
}

NdSignal diff_axis_adjoint(const NdSignal& t, std::size_t axis) {
  return shifted_combine(t, axis, Neighbor::prev, -1.0, "diff_axis_adjoint");
}

CoeffStack::CoeffStack(NdSignal::Shape shape)
    : shape_(std::move(shape)), n_(product(shape_)), data_(2 * shape_.size() * n_, 0.0) {}

double dot(const CoeffStack& a, const CoeffStack& b) {
  if (a.shape() != b.shape()) throw ShapeError("dot: coefficient stacks of different shapes");
  return kernels::active().dot(a.values().data(), b.values().data(), a.values().size());
}

double l2_norm(const CoeffStack& u) { return std::sqrt(dot(u, u)); }

CoeffStack operator-(const CoeffStack& a, const CoeffStack& b) {
  if (a.shape() != b.shape()) throw ShapeError("operator-: coefficient stacks of different shapes");
  CoeffStack out(a.shape());
  kernels::active().axpby(1.0, a.values().data(), -1.0, b.values().data(), out.values().data(),
                          out.values().size());
  return out;
}

CoeffStack w_forward(const NdSignal& z) {
  require_frame_shape(z, "w_forward");
  const std::size_t d = z.dims();
  const double scale = 1.0 / (2.0 * std::sqrt(static_cast<double>(d)));
  CoeffStack u(z.shape());
  const auto& k = kernels::active();
  for (std::size_t j = 0; j < d; ++j) {
    double* avg = u.avg(j).data();
    double* dif = u.dif(j).data();
    for_each_segment(z.shape(), j, Neighbor::next, [&](Segment s) {
      k.combine(z.data() + s.dst, z.data() + s.nb, avg + s.dst, s.len, scale, 1.0);
      k.combine(z.data() + s.dst, z.data() + s.nb, dif + s.dst, s.len, scale, -1.0);
    });
  }
  return u;
}

NdSignal w_adjoint(const CoeffStack& u) {
  if (u.dims() == 0) throw ShapeError("w_adjoint: empty coefficient stack");
  NdSignal out(u.shape());
  require_frame_shape(out, "w_adjoint");
  const std::size_t d = u.dims();
  const double scale = 1.0 / (2.0 * std::sqrt(static_cast<double>(d)));
  const auto& k = kernels::active();
  for (std::size_t j = 0; j < d; ++j) {
    const double* avg = u.avg(j).data();
    const double* dif = u.dif(j).data();
    for_each_segment(u.shape(), j, Neighbor::prev, [&](Segment s) {
      k.accumulate_haar_adjoint(avg + s.dst, dif + s.dst, avg + s.nb, dif + s.nb,
                                out.data() + s.dst, s.len);
    });
  }
  out *= scale;
  return out;
}

GradientField::GradientField(NdSignal::Shape shape)
    : shape_(std::move(shape)), n_(product(shape_)), data_(shape_.size() * n_, 0.0) {}

void mask_free_boundary(GradientField& t) {
  for (std::size_t j = 0; j < t.dims(); ++j) {
    double* b = t.block(j).data();
    for_each_segment(t.shape(), j, Neighbor::next, [&](Segment s) {
      // The wrapped run is the one whose neighbour precedes it.
      if (s.nb < s.dst) std::fill_n(b + s.dst, s.len, 0.0);
    });
  }
}

void forward_differences(const NdSignal& x, Boundary boundary, GradientField& out, double scale) {
  require_frame_shape(x, "forward_differences");
  if (out.shape() != x.shape()) out = GradientField(x.shape());
  const auto& k = kernels::active();
  for (std::size_t j = 0; j < x.dims(); ++j) {
    double* b = out.block(j).data();
    for_each_segment(x.shape(), j, Neighbor::next, [&](Segment s) {
      k.combine(x.data() + s.dst, x.data() + s.nb, b + s.dst, s.len, scale, -1.0);
    });
  }
  if (boundary == Boundary::free) mask_free_boundary(out);
}

GradientField forward_differences(const NdSignal& x, Boundary boundary) {
  GradientField g(x.shape());
  forward_differences(x, boundary, g);
  return g;
}

void accumulate_difference_adjoint(const GradientField& t, Boundary boundary, NdSignal& out,
                                   double scale) {
  if (t.shape() != out.shape()) throw ShapeError("accumulate_difference_adjoint: shape mismatch");
  require_frame_shape(out, "accumulate_difference_adjoint");
  const GradientField* src = &t;
  GradientField masked;
  if (boundary == Boundary::free) {
    masked = t;
    mask_free_boundary(masked);
    src = &masked;
  }
  const auto& k = kernels::active();
  for (std::size_t j = 0; j < t.dims(); ++j) {
    const double* b = src->block(j).data();
    for_each_segment(t.shape(), j, Neighbor::prev, [&](Segment s) {
      k.accumulate_diff_adjoint(b + s.dst, b + s.nb, out.data() + s.dst, s.len, scale);
    });
  }
}

NdSignal difference_adjoint(const GradientField& t, Boundary boundary) {
  NdSignal out(t.shape());
  accumulate_difference_adjoint(t, boundary, out);
  return out;
}

}  // namespace tvprox
