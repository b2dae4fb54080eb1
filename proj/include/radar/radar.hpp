#pragma once

// Umbrella header: the whole library.

#include "radar/archspec.hpp"
#include "radar/attack.hpp"
#include "radar/codec.hpp"
#include "radar/codes.hpp"
#include "radar/dataset.hpp"
#include "radar/experiments.hpp"
#include "radar/int8.hpp"
#include "radar/model.hpp"
#include "radar/rng.hpp"
#include "radar/serialize.hpp"
#include "radar/tensor.hpp"
#include "radar/train.hpp"
