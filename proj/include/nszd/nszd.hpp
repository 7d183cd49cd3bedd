// Copyright 2026 The NSZD Authors
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

#ifndef NSZD_NSZD_HPP_
#define NSZD_NSZD_HPP_

#include "nszd/collector_nszd.hpp"
#include "nszd/errors.hpp"
#include "nszd/extortion.hpp"
#include "nszd/markov_engine.hpp"
#include "nszd/payoff_model.hpp"
#include "nszd/pinning.hpp"
#include "nszd/simulator.hpp"

#endif  // NSZD_NSZD_HPP_
