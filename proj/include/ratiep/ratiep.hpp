#pragma once
#include "errors.hpp"
#include "linalg.hpp"
#include "types.hpp"
#include "krylov.hpp"
#include "updating.hpp"
#include "orf_eval.hpp"
#include "metrics.hpp"
#include "generators.hpp"
#include "experiment.hpp"
#include "io.hpp"
