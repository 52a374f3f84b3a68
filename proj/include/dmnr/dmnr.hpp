// Umbrella header for the whole toolkit.

#ifndef DMNR_DMNR_HPP
#define DMNR_DMNR_HPP

#include "dmnr/config.hpp"
#include "dmnr/density.hpp"
#include "dmnr/errors.hpp"
#include "dmnr/filter.hpp"
#include "dmnr/hdbscan.hpp"
#include "dmnr/io.hpp"
#include "dmnr/kdtree.hpp"
#include "dmnr/metrics.hpp"
#include "dmnr/report.hpp"
#include "dmnr/rescue.hpp"
#include "dmnr/synth.hpp"
#include "dmnr/types.hpp"

#endif  // DMNR_DMNR_HPP
