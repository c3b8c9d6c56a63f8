#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "amf/types.hpp"

namespace amf {

/// Parses an ISO-8601 calendar date (YYYY-MM-DD). Throws Error(Validation).
Date parse_date(std::string_view text);
std::string format_date(Date d);

Date make_date(int year, unsigned month, unsigned day);
int year_of(Date d);
bool is_friday(Date d);

/// Grid slot of an observation: weeks run Saturday..Friday and are labelled
/// by their Friday, so a Thursday close stands in for a holiday Friday.
Date week_slot(Date d);

/// Latest Friday on or before d.
Date friday_on_or_before(Date d);

/// n consecutive Fridays starting at first (which must be a Friday).
std::vector<Date> weekly_grid(Date first, std::size_t n);

/// Fridays in the closed interval [from, to].
std::size_t count_fridays(Date from, Date to);

}  // namespace amf
