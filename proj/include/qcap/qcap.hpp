#pragma once

// Umbrella header: queue-channel capacity toolkit.

#include "qcap/capacity.hpp"
#include "qcap/coding.hpp"
#include "qcap/decoherence.hpp"
#include "qcap/distributions.hpp"
#include "qcap/entropy.hpp"
#include "qcap/errors.hpp"
#include "qcap/estimator.hpp"
#include "qcap/json_io.hpp"
#include "qcap/optimizer.hpp"
#include "qcap/parallel.hpp"
#include "qcap/quadrature.hpp"
#include "qcap/queue_sim.hpp"
#include "qcap/rng.hpp"
#include "qcap/service_comparison.hpp"
#include "qcap/stats.hpp"
