#pragma once

#include "phmor/benchmarks.hpp"
#include "phmor/error.hpp"
#include "phmor/experiment.hpp"
#include "phmor/interpolation.hpp"
#include "phmor/io.hpp"
#include "phmor/irka.hpp"
#include "phmor/linalg.hpp"
#include "phmor/partition.hpp"
#include "phmor/reduced_model.hpp"
#include "phmor/reducers.hpp"
#include "phmor/regularize.hpp"
#include "phmor/system.hpp"
#include "phmor/transfer.hpp"
