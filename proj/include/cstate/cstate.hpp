#pragma once

#include "cstate/error.hpp"
#include "cstate/checks.hpp"
#include "cstate/quadrature.hpp"
#include "cstate/hilbert.hpp"
#include "cstate/coherent.hpp"
#include "cstate/squeezed.hpp"
#include "cstate/pullback.hpp"
#include "cstate/disk.hpp"
#include "cstate/repn.hpp"
#include "cstate/berezin.hpp"
#include "cstate/report.hpp"
#include "cstate/runner.hpp"
