#include "emtime/core/time_map.hpp"

#include <math.h>  // pchip in this Boost release calls unqualified isnan

#include <algorithm>
#include <boost/math/interpolators/pchip.hpp>
#include <cmath>

#include "emtime/core/errors.hpp"

namespace emtime {

using boost::math::interpolators::pchip;

struct TimeMap::Interp {
  pchip<std::vector<double>> forward;
  pchip<std::vector<double>> inverse;
};

TimeMap::TimeMap(std::vector<double> R, std::vector<double> t) : R_(std::move(R)), t_(std::move(t)) {
  if (R_.size() != t_.size()) throw ShapeError("time map: R and t tables differ in length");
  if (R_.size() < 4) throw ShapeError("time map needs at least 4 samples");
  for (std::size_t i = 1; i < R_.size(); ++i) {
    if (!(R_[i] > R_[i - 1])) throw DomainError("time map: R must be strictly increasing");
    if (!(t_[i] > t_[i - 1])) throw DomainError("time map: t must be strictly increasing");
  }
  auto a = R_, b = t_, c = t_, d = R_;
  interp_ = std::make_shared<const Interp>(
      Interp{pchip<std::vector<double>>(std::move(a), std::move(b)), pchip<std::vector<double>>(std::move(c), std::move(d))});
}

double TimeMap::t_at(double R) const {
  if (R < R_.front() || R > R_.back()) throw DomainError("time map: R outside the clock grid");
  return interp_->forward(R);
}

double TimeMap::R_at(double t) const {
  if (t < t_.front() || t > t_.back()) throw DomainError("time map: t outside the mapped range");
  return interp_->inverse(t);
}

double TimeMap::dR_dt(double t) const {
  if (t < t_.front() || t > t_.back()) throw DomainError("time map: t outside the mapped range");
  return interp_->inverse.prime(t);
}

}  // namespace emtime
