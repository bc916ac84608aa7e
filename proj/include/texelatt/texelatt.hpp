#pragma once

// Everything except the HTTP service (texelatt/service.hpp).

#include "texelatt/color.hpp"
#include "texelatt/core.hpp"
#include "texelatt/corpus.hpp"
#include "texelatt/descriptor.hpp"
#include "texelatt/detect.hpp"
#include "texelatt/layout_stats.hpp"
#include "texelatt/png_io.hpp"
#include "texelatt/rank_eval.hpp"
#include "texelatt/rng.hpp"
#include "texelatt/search.hpp"
#include "texelatt/serialize.hpp"
#include "texelatt/spatial_index.hpp"
#include "texelatt/synth.hpp"
#include "texelatt/texel_attr.hpp"
