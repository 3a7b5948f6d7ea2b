#pragma once

#include "gpscatter/energies.hpp"
#include "gpscatter/error.hpp"
#include "gpscatter/evolution.hpp"
#include "gpscatter/fft.hpp"
#include "gpscatter/field.hpp"
#include "gpscatter/grid.hpp"
#include "gpscatter/io.hpp"
#include "gpscatter/lax.hpp"
#include "gpscatter/metric.hpp"
#include "gpscatter/miura.hpp"
#include "gpscatter/parallel.hpp"
