// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Umbrella header.

#ifndef SEANET_SEANET_HPP_
#define SEANET_SEANET_HPP_

#include "seanet/core/ops.hpp"
#include "seanet/core/parameters.hpp"
#include "seanet/core/sequence_ops.hpp"
#include "seanet/core/tensor.hpp"
#include "seanet/metrics/metrics.hpp"
#include "seanet/nn/config.hpp"
#include "seanet/nn/decoder.hpp"
#include "seanet/nn/dprnn.hpp"
#include "seanet/nn/encoders.hpp"
#include "seanet/nn/fusion.hpp"
#include "seanet/nn/layers.hpp"
#include "seanet/nn/multimodal.hpp"
#include "seanet/nn/network.hpp"
#include "seanet/nn/psnl.hpp"
#include "seanet/nn/reverse_attention.hpp"
#include "seanet/signal/audio.hpp"
#include "seanet/signal/manifest.hpp"
#include "seanet/signal/mixing.hpp"
#include "seanet/signal/spectral.hpp"
#include "seanet/signal/synth.hpp"
#include "seanet/train/ablation.hpp"
#include "seanet/train/checkpoint.hpp"
#include "seanet/train/config.hpp"
#include "seanet/train/data.hpp"
#include "seanet/train/evaluate.hpp"
#include "seanet/train/optimizer.hpp"
#include "seanet/train/plots.hpp"
#include "seanet/train/trainer.hpp"

#endif  // SEANET_SEANET_HPP_
