// Copyright 2026 The qecopt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Umbrella header.

#pragma once

#include "qecopt/pauli.hpp"
#include "qecopt/channel.hpp"
#include "qecopt/code.hpp"
#include "qecopt/logical_channel.hpp"
#include "qecopt/noise.hpp"
#include "qecopt/decoder_opt.hpp"
#include "qecopt/threshold.hpp"
#include "qecopt/dense_oracle.hpp"
#include "qecopt/experiments.hpp"
