#pragma once

#include "hadamard/errors.hpp"
#include "hadamard/extended_real.hpp"
#include "hadamard/space.hpp"
#include "hadamard/metric_checks.hpp"
#include "hadamard/region.hpp"
#include "hadamard/functional.hpp"
#include "hadamard/convexity.hpp"
#include "hadamard/prox.hpp"
#include "hadamard/slope.hpp"
#include "hadamard/prox_lemmas.hpp"
#include "hadamard/tail.hpp"
#include "hadamard/convergence.hpp"
#include "hadamard/convergence_lemmas.hpp"
#include "hadamard/slope_profile.hpp"
#include "hadamard/set_mosco.hpp"
#include "hadamard/families.hpp"
#include "hadamard/theorems.hpp"
#include "hadamard/descriptor.hpp"
#include "hadamard/config.hpp"
#include "hadamard/runner.hpp"
