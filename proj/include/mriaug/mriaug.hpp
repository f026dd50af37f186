#pragma once

#include "mriaug/affine.hpp"
#include "mriaug/buffer_api.hpp"
#include "mriaug/config.hpp"
#include "mriaug/error.hpp"
#include "mriaug/fft.hpp"
#include "mriaug/grid.hpp"
#include "mriaug/hash.hpp"
#include "mriaug/intensity.hpp"
#include "mriaug/kspace.hpp"
#include "mriaug/nifti.hpp"
#include "mriaug/phantom.hpp"
#include "mriaug/pipeline.hpp"
#include "mriaug/png.hpp"
#include "mriaug/preview.hpp"
#include "mriaug/rng.hpp"
#include "mriaug/sampler.hpp"
#include "mriaug/spatial.hpp"
#include "mriaug/version.hpp"
#include "mriaug/volume.hpp"
