#pragma once

#include "setflex/taxa.hpp"
#include "setflex/report.hpp"
#include "setflex/set_system.hpp"
#include "setflex/set_system_io.hpp"
#include "setflex/graphopt.hpp"
#include "setflex/phylo.hpp"
#include "setflex/flex.hpp"
#include "setflex/represent.hpp"
