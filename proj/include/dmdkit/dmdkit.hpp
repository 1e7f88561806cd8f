#pragma once

#include <dmdkit/types.hpp>
#include <dmdkit/linalg.hpp>
#include <dmdkit/data_model.hpp>
#include <dmdkit/dmd.hpp>
#include <dmdkit/scaling.hpp>
#include <dmdkit/era.hpp>
#include <dmdkit/lim.hpp>
#include <dmdkit/generators.hpp>
#include <dmdkit/io/csv.hpp>
