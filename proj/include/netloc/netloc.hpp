#ifndef NETLOC_NETLOC_HPP_
#define NETLOC_NETLOC_HPP_

#include "netloc/constraint_matrices.hpp"
#include "netloc/constraints.hpp"
#include "netloc/errors.hpp"
#include "netloc/estimator.hpp"
#include "netloc/formation.hpp"
#include "netloc/geometry.hpp"
#include "netloc/graph.hpp"
#include "netloc/motion.hpp"
#include "netloc/network_measurement.hpp"
#include "netloc/parameter_estimator.hpp"
#include "netloc/scenario.hpp"
#include "netloc/simulation.hpp"
#include "netloc/trajectory_log.hpp"

#endif  // NETLOC_NETLOC_HPP_
