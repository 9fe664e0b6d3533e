// Copyright 2026 The embc Authors
// SPDX-License-Identifier: Apache-2.0
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

#pragma once

#include "embc/batch.hpp"
#include "embc/commsim.hpp"
#include "embc/config.hpp"
#include "embc/container.hpp"
#include "embc/csv.hpp"
#include "embc/datagen.hpp"
#include "embc/errors.hpp"
#include "embc/huffman.hpp"
#include "embc/policy.hpp"
#include "embc/quantizer.hpp"
#include "embc/valuefile.hpp"
#include "embc/vlz.hpp"
