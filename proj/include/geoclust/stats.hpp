#pragma once

namespace geoclust {

// Two-sided p-value of a t statistic with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);

}  // namespace geoclust
