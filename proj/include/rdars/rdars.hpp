// SPDX-License-Identifier: Apache-2.0
//
// rdars-pwm: joint beamforming and mode switching for RDARS-aided MIMO downlinks
// Copyright (C) 2026 The rdars-pwm authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef RDARS_RDARS_HPP
#define RDARS_RDARS_HPP

#include "rdars/active.hpp"
#include "rdars/channel.hpp"
#include "rdars/config.hpp"
#include "rdars/counters.hpp"
#include "rdars/experiment.hpp"
#include "rdars/mode_switch.hpp"
#include "rdars/model.hpp"
#include "rdars/parallel.hpp"
#include "rdars/params.hpp"
#include "rdars/passive.hpp"
#include "rdars/selfcheck.hpp"
#include "rdars/solver.hpp"
#include "rdars/train.hpp"
#include "rdars/types.hpp"

#endif
