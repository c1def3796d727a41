#include "geoclust/stats.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "geoclust/errors.hpp"

namespace geoclust {

double student_t_two_sided_p(double t, double dof) {
  if (dof <= 0.0) throw ValidationError("t distribution needs dof > 0");
  if (std::isnan(t)) return 1.0;
  if (std::isinf(t)) return 0.0;
  const boost::math::students_t dist(dof);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

}  // namespace geoclust
