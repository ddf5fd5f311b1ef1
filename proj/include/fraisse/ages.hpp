#pragma once

#include "fraisse/age.hpp"
#include "fraisse/rational.hpp"

namespace fraisse {

/// Finite linear orders; member(i) is the i-element chain.
AgeRepPtr make_linear_orders_age();

/// Finite simple graphs; members enumerated by size, then edge bitmask.
AgeRepPtr make_graphs_age();

/// K_1: finite substructures of the rational order with every point
/// U-marked and carrying its own color Q_q. The base level of the tower.
AgeRepPtr make_k1_age();

/// Deliberately defective variant of the linear orders age (the 1-element
/// chain is missing from the enumeration); exercises the HP checker and
/// the DefectiveAge path.
AgeRepPtr make_broken_linorders_age();

/// K_1 symbol names (shared with the tower construction).
std::string k1_u_name();
std::string k1_order_name();
std::string k1_color_name(const Rational& q);

}  // namespace fraisse
