#ifndef BIQ2_BIQ2_HPP
#define BIQ2_BIQ2_HPP

#include "biq2/arith.hpp"
#include "biq2/classify.hpp"
#include "biq2/fields.hpp"
#include "biq2/formclass.hpp"
#include "biq2/genus2rank.hpp"
#include "biq2/multiquad.hpp"
#include "biq2/quadunits.hpp"
#include "biq2/report.hpp"

#endif
