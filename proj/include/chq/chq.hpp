// Everything: spaces, histories, families, inference, scenarios, sampling.
#pragma once

#include "chq/core.hpp"
#include "chq/hilbert.hpp"
#include "chq/histories.hpp"
#include "chq/event.hpp"
#include "chq/frameworks.hpp"
#include "chq/inference.hpp"
#include "chq/sampler.hpp"
#include "chq/scenario_spec.hpp"
#include "chq/scenario_text.hpp"
#include "chq/scenario.hpp"
#include "chq/builtins.hpp"
#include "chq/report.hpp"
