#pragma once

#include <chainlab/harness/catalog.hpp>
#include <chainlab/harness/params.hpp>
#include <chainlab/harness/report.hpp>
#include <chainlab/harness/sim.hpp>
