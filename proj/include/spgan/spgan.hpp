// Copyright 2026 The spgan-prior Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPGAN_SPGAN_HPP
#define SPGAN_SPGAN_HPP

#include "spgan/ablation.hpp"
#include "spgan/checkpoint.hpp"
#include "spgan/cloud_io.hpp"
#include "spgan/common.hpp"
#include "spgan/config.hpp"
#include "spgan/dataset.hpp"
#include "spgan/kmeans.hpp"
#include "spgan/losses.hpp"
#include "spgan/metrics.hpp"
#include "spgan/nets.hpp"
#include "spgan/optimizer.hpp"
#include "spgan/pointcloud.hpp"
#include "spgan/prior.hpp"
#include "spgan/svg.hpp"
#include "spgan/synthetic.hpp"
#include "spgan/training.hpp"

#endif  // SPGAN_SPGAN_HPP
