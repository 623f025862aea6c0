/** Umbrella header. */

#ifndef LIPINV_LIPINV_HPP
#define LIPINV_LIPINV_HPP

#include "certificate.hpp"
#include "clarke.hpp"
#include "core.hpp"
#include "corpus.hpp"
#include "criteria.hpp"
#include "expr.hpp"
#include "finsler.hpp"
#include "inverter.hpp"
#include "maps.hpp"
#include "norms.hpp"
#include "polyhedron.hpp"
#include "report.hpp"
#include "run.hpp"

#endif  // LIPINV_LIPINV_HPP
