#pragma once

#include "finslab/clifford.hpp"
#include "finslab/curvature.hpp"
#include "finslab/errors.hpp"
#include "finslab/experiment.hpp"
#include "finslab/io.hpp"
#include "finslab/isoparametric.hpp"
#include "finslab/minkowski.hpp"
#include "finslab/navigation.hpp"
#include "finslab/report.hpp"
#include "finslab/sphere.hpp"
