#pragma once

#include "cloudsteg/bits.hpp"
#include "cloudsteg/channel_sim.hpp"
#include "cloudsteg/error.hpp"
#include "cloudsteg/experiment.hpp"
#include "cloudsteg/format.hpp"
#include "cloudsteg/framing.hpp"
#include "cloudsteg/io.hpp"
#include "cloudsteg/receiver.hpp"
#include "cloudsteg/sender.hpp"
