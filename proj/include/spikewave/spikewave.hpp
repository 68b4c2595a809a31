#pragma once

// Umbrella header: time-causal scale-space kernels, LIF spike encoding,
// spiking and classical wavelet reconstruction, and the comparison runner.

#include "spikewave/analysis.hpp"
#include "spikewave/classical_wavelet.hpp"
#include "spikewave/common.hpp"
#include "spikewave/io.hpp"
#include "spikewave/neuron.hpp"
#include "spikewave/scale_space.hpp"
#include "spikewave/signal.hpp"
#include "spikewave/spiking_wavelet.hpp"
