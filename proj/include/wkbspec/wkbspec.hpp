#pragma once

#include "wkbspec/errors.hpp"
#include "wkbspec/core.hpp"
#include "wkbspec/quadrature.hpp"
#include "wkbspec/angular.hpp"
#include "wkbspec/spectra.hpp"
#include "wkbspec/quantizer.hpp"
#include "wkbspec/wavefunction.hpp"
#include "wkbspec/oracle.hpp"
