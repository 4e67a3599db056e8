/*
Copyright 2026 The mvpo Authors
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
you may obtain a copy of the License at

                http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include "analyzer.hpp"
#include "codec.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "file_io.hpp"
#include "mv_core.hpp"
#include "report_format.hpp"
#include "stego.hpp"
#include "stream_format.hpp"
#include "synth.hpp"
#include "yuv_io.hpp"
