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

#include "foley/nn/checkpoint.h"

#include <sstream>
#include <unordered_map>

#include "foley/binary_io.h"
#include "foley/errors.h"

namespace foley::nn {
namespace {

std::size_t element_count(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) n *= static_cast<std::size_t>(d);
  return n;
}

std::string shape_text(const std::vector<int>& shape) {
  std::string s;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(shape[i]);
  }
  return s;
}

}  // namespace

std::vector<unsigned char> encode_arrays(const std::vector<NamedArray>& arrays) {
  std::string manifest;
  for (const NamedArray& a : arrays) {
    if (a.name.find_first_of("\t\n") != std::string::npos) {
      throw FormatError("array name contains a tab or newline: " + a.name);
    }
    if (element_count(a.shape) != a.data.size()) {
      throw ShapeError("array " + a.name + " data size does not match its shape");
    }
    manifest += a.name + "\tf32\t" + shape_text(a.shape) + "\n";
  }
  bin::Writer w;
  w.u32(bin::magic("FCK1"));
  w.u32(static_cast<std::uint32_t>(manifest.size()));
  w.text(manifest);
  for (const NamedArray& a : arrays) w.f32s(a.data);
  return w.buffer();
}

std::vector<NamedArray> decode_arrays(const std::vector<unsigned char>& bytes) {
  bin::Reader r(bytes);
  if (r.u32() != bin::magic("FCK1")) throw FormatError("bad checkpoint magic");
  const std::uint32_t manifest_len = r.u32();
  std::istringstream manifest(r.text(manifest_len));
  std::vector<NamedArray> arrays;
  std::string line;
  while (std::getline(manifest, line)) {
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = line.find('\t', t1 == std::string::npos ? t1 : t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos) {
      throw FormatError("bad manifest line: " + line);
    }
    NamedArray a;
    a.name = line.substr(0, t1);
    const std::string dtype = line.substr(t1 + 1, t2 - t1 - 1);
    if (dtype != "f32") throw UnsupportedFormatError("unsupported dtype " + dtype + " for " + a.name);
    std::istringstream dims(line.substr(t2 + 1));
    std::string d;
    while (std::getline(dims, d, ',')) {
      if (!d.empty()) a.shape.push_back(std::stoi(d));
    }
    arrays.push_back(std::move(a));
  }
  for (NamedArray& a : arrays) {
    a.data.resize(element_count(a.shape));
    r.f32s(a.data);
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes after checkpoint payload");
  return arrays;
}

void save_arrays(const std::filesystem::path& path, const std::vector<NamedArray>& arrays) {
  bin::write_file(path, encode_arrays(arrays));
}

std::vector<NamedArray> load_arrays(const std::filesystem::path& path) {
  try {
    return decode_arrays(bin::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

template <typename T>
std::vector<NamedArray> export_params(const ParamStore<T>& store) {
  std::vector<NamedArray> out;
  for (const Param<T>* p : store.params()) {
    out.push_back({p->name, p->shape, std::vector<float>(p->value.begin(), p->value.end())});
  }
  return out;
}

template <typename T>
void import_params(ParamStore<T>& store, const std::vector<NamedArray>& arrays, bool allow_extra) {
  std::unordered_map<std::string, const NamedArray*> by_name;
  for (const NamedArray& a : arrays) by_name[a.name] = &a;
  std::size_t used = 0;
  for (Param<T>* p : store.params()) {
    auto it = by_name.find(p->name);
    if (it == by_name.end()) throw ShapeError("checkpoint lacks parameter " + p->name);
    if (it->second->shape != p->shape) {
      throw ShapeError("checkpoint shape for " + p->name + " is [" + shape_text(it->second->shape) +
                       "], model expects [" + shape_text(p->shape) + "]");
    }
    std::copy(it->second->data.begin(), it->second->data.end(), p->value.begin());
    ++used;
  }
  if (!allow_extra && used != arrays.size()) {
    throw ShapeError("checkpoint holds " + std::to_string(arrays.size() - used) +
                     " arrays the model does not define");
  }
}

template std::vector<NamedArray> export_params(const ParamStore<float>&);
template std::vector<NamedArray> export_params(const ParamStore<double>&);
template void import_params(ParamStore<float>&, const std::vector<NamedArray>&, bool);
template void import_params(ParamStore<double>&, const std::vector<NamedArray>&, bool);

}  // namespace foley::nn
