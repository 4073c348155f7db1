#pragma once

#include "iinr/activation.hpp"
#include "iinr/adam.hpp"
#include "iinr/checkpoint.hpp"
#include "iinr/harness.hpp"
#include "iinr/image.hpp"
#include "iinr/latent.hpp"
#include "iinr/layer.hpp"
#include "iinr/metrics.hpp"
#include "iinr/mlp.hpp"
#include "iinr/model.hpp"
#include "iinr/record.hpp"
#include "iinr/rng.hpp"
#include "iinr/tasks.hpp"
#include "iinr/tensor.hpp"
