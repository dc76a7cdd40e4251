#pragma once

#include "analytic.hpp"
#include "divisibility.hpp"
#include "errors.hpp"
#include "ledger.hpp"
#include "ledger_json.hpp"
#include "psidyn.hpp"
#include "seqcore.hpp"
#include "specfun.hpp"
#include "spectrum.hpp"
#include "transform.hpp"

namespace momfix {}
