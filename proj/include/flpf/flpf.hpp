#pragma once

#include "flpf/error.hpp"
#include "flpf/rational.hpp"
#include "flpf/link_set.hpp"
#include "flpf/interference.hpp"
#include "flpf/fading.hpp"
#include "flpf/lp.hpp"
#include "flpf/pooling.hpp"
#include "flpf/sim.hpp"
#include "flpf/network_file.hpp"
