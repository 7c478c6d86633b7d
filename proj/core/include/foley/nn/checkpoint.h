// Copyright (c) 2026 The foleysynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FOLEY_NN_CHECKPOINT_H_
#define FOLEY_NN_CHECKPOINT_H_

#include <filesystem>
#include <string>
#include <vector>

#include "foley/nn/params.h"

namespace foley::nn {

struct NamedArray {
  std::string name;
  std::vector<int> shape;
  std::vector<float> data;
};

// Container layout (all integers little-endian uint32):
//   magic "FCK1" | manifest byte length | manifest | payload
// The manifest is UTF-8 text with one line per array,
//   <name>\tf32\t<d0>,<d1>,...\n
// and the payload concatenates every array as LE float32 in manifest order.
std::vector<unsigned char> encode_arrays(const std::vector<NamedArray>& arrays);
std::vector<NamedArray> decode_arrays(const std::vector<unsigned char>& bytes);

void save_arrays(const std::filesystem::path& path, const std::vector<NamedArray>& arrays);
std::vector<NamedArray> load_arrays(const std::filesystem::path& path);

template <typename T>
std::vector<NamedArray> export_params(const ParamStore<T>& store);

// Every parameter must be present with an identical shape; extra arrays are
// an error unless `allow_extra`.
template <typename T>
void import_params(ParamStore<T>& store, const std::vector<NamedArray>& arrays,
                   bool allow_extra = false);

}  // namespace foley::nn

#endif  // FOLEY_NN_CHECKPOINT_H_
