#ifndef BREASE_BREASE_HPP
#define BREASE_BREASE_HPP

#include "brease/errors.hpp"
#include "brease/numerics.hpp"
#include "brease/trial_data.hpp"
#include "brease/model.hpp"
#include "brease/mixture.hpp"
#include "brease/samplers.hpp"
#include "brease/evidence.hpp"
#include "brease/comparators.hpp"
#include "brease/summaries.hpp"
#include "brease/covariates.hpp"
#include "brease/oracle.hpp"
#include "brease/io.hpp"

#endif  // BREASE_BREASE_HPP
