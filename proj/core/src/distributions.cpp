#include "amf/distributions.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/beta.hpp>

#include "amf/error.hpp"

namespace amf {

namespace {
void check_df(double df) {
    if (!(df > 0.0) || !std::isfinite(df)) throw Error(ErrorCode::InvalidArgument, "degrees of freedom must be positive");
}
}  // namespace

double student_t_two_sided_p(double t, double df) {
    check_df(df);
    if (std::isnan(t)) return 1.0;
    if (std::isinf(t)) return 0.0;
    const double x = df / (df + t * t);
    return boost::math::ibeta(df / 2.0, 0.5, x);
}

double student_t_cdf(double t, double df) {
    const double tail = 0.5 * student_t_two_sided_p(t, df);
    return t < 0.0 ? tail : 1.0 - tail;
}

double f_upper_p(double f, double df1, double df2) {
    check_df(df1);
    check_df(df2);
    if (std::isnan(f) || f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    // P(F > f) = I_{d2/(d2 + d1 f)}(d2/2, d1/2)
    const double x = df2 / (df2 + df1 * f);
    return boost::math::ibeta(df2 / 2.0, df1 / 2.0, x);
}

double f_cdf(double f, double df1, double df2) {
    check_df(df1);
    check_df(df2);
    if (std::isnan(f) || f <= 0.0) return 0.0;
    if (std::isinf(f)) return 1.0;
    const double x = df1 * f / (df1 * f + df2);
    return boost::math::ibeta(df1 / 2.0, df2 / 2.0, x);
}

}  // namespace amf
