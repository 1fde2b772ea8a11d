#pragma once

/// Umbrella header for the whole library.

#include "pfkit/errors.hpp"
#include "pfkit/field.hpp"
#include "pfkit/r1cs.hpp"
#include "pfkit/r1cs_search.hpp"
#include "pfkit/pfcs.hpp"
#include "pfkit/pfcs_parser.hpp"
#include "pfkit/pfcs_sem.hpp"
#include "pfkit/flatten.hpp"
#include "pfkit/simplify.hpp"
#include "pfkit/gadgets.hpp"
#include "pfkit/verify.hpp"
#include "pfkit/json_io.hpp"
