#pragma once

#include "ftmux/analytic_rates.hpp"
#include "ftmux/config.hpp"
#include "ftmux/config_json.hpp"
#include "ftmux/errors.hpp"
#include "ftmux/loss_ledger.hpp"
#include "ftmux/monte_carlo.hpp"
#include "ftmux/random.hpp"
#include "ftmux/scheduler.hpp"
