// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Single-file checkpoint archive.
//
//   "SEANETCK"            8-byte magic
//   u32 version           kCheckpointVersion
//   u64 n, n bytes        JSON metadata (configs, epoch, step, rng state, ...)
//   u32 count             number of arrays
//   per array:
//     u32 n, n bytes      name ("param/<path>", "adam_m/<path>", "adam_v/<path>")
//     u8  scalar size     4 (float) or 8 (double)
//     i64 rows, i64 cols
//     rows*cols scalars   row-major, little-endian
//
// Values are stored in the network's native scalar type, so a round trip is
// bit-exact.

#ifndef SEANET_TRAIN_CHECKPOINT_HPP_
#define SEANET_TRAIN_CHECKPOINT_HPP_

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "seanet/core/parameters.hpp"
#include "seanet/train/optimizer.hpp"

namespace seanet {

inline constexpr uint32_t kCheckpointVersion = 1;
inline constexpr char kCheckpointMagic[8] = {'S', 'E', 'A', 'N', 'E', 'T', 'C', 'K'};

template <typename T>
struct Checkpoint {
  nlohmann::json meta;
  std::map<std::string, Matrix<T>> params;
  std::map<std::string, Matrix<T>> adam_m, adam_v;
  long long adam_steps = 0;
};

namespace detail {

template <typename V>
void put(std::ofstream& os, V v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(V));
}

template <typename V>
V get(std::ifstream& is, const std::string& path) {
  V v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(V))) throw std::runtime_error(path + ": truncated checkpoint");
  return v;
}

template <typename T>
void put_array(std::ofstream& os, const std::string& name, const Matrix<T>& m) {
  put<uint32_t>(os, static_cast<uint32_t>(name.size()));
  os.write(name.data(), static_cast<std::streamsize>(name.size()));
  put<uint8_t>(os, static_cast<uint8_t>(sizeof(T)));
  put<int64_t>(os, m.rows());
  put<int64_t>(os, m.cols());
  os.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(T)));
}

}  // namespace detail

/// Writes the parameters of `store` (and the optimizer state, if given).
template <typename T>
void save_checkpoint(const std::string& path, const ParameterStore<T>& store, const nlohmann::json& meta,
                     const Adam<T>* adam = nullptr) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.write(kCheckpointMagic, 8);
  detail::put<uint32_t>(os, kCheckpointVersion);
  nlohmann::json m = meta;
  if (adam) m["adam_steps"] = adam->steps();
  const std::string js = m.dump();
  detail::put<uint64_t>(os, js.size());
  os.write(js.data(), static_cast<std::streamsize>(js.size()));
  const auto& entries = store.entries();
  const uint32_t count = static_cast<uint32_t>(entries.size() * (adam ? 3 : 1));
  detail::put<uint32_t>(os, count);
  for (size_t i = 0; i < entries.size(); ++i) {
    detail::put_array(os, "param/" + entries[i].name, entries[i].var.value());
    if (adam) {
      detail::put_array(os, "adam_m/" + entries[i].name, adam->first_moments()[i]);
      detail::put_array(os, "adam_v/" + entries[i].name, adam->second_moments()[i]);
    }
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

template <typename T>
Checkpoint<T> load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint " + path);
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kCheckpointMagic, 8) != 0)
    throw std::runtime_error(path + ": not a checkpoint file");
  const uint32_t version = detail::get<uint32_t>(is, path);
  if (version != kCheckpointVersion)
    throw std::runtime_error(path + ": unsupported checkpoint version " + std::to_string(version) + " (expected " +
                             std::to_string(kCheckpointVersion) + ")");
  const uint64_t jn = detail::get<uint64_t>(is, path);
  std::string js(jn, '\0');
  if (!is.read(js.data(), static_cast<std::streamsize>(jn))) throw std::runtime_error(path + ": truncated checkpoint");
  Checkpoint<T> ck;
  ck.meta = nlohmann::json::parse(js);
  if (ck.meta.contains("adam_steps")) ck.adam_steps = ck.meta["adam_steps"].template get<long long>();
  const uint32_t count = detail::get<uint32_t>(is, path);
  for (uint32_t a = 0; a < count; ++a) {
    const uint32_t nn = detail::get<uint32_t>(is, path);
    std::string name(nn, '\0');
    if (!is.read(name.data(), nn)) throw std::runtime_error(path + ": truncated checkpoint");
    const uint8_t sz = detail::get<uint8_t>(is, path);
    const int64_t rows = detail::get<int64_t>(is, path), cols = detail::get<int64_t>(is, path);
    if (rows < 0 || cols < 0) throw std::runtime_error(path + ": corrupt array header for " + name);
    Matrix<T> m(rows, cols);
    if (sz == sizeof(T)) {
      if (!is.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(T))))
        throw std::runtime_error(path + ": truncated checkpoint");
    } else if (sz == 4 || sz == 8) {
      for (Index i = 0; i < m.size(); ++i)
        m.data()[i] = sz == 4 ? static_cast<T>(detail::get<float>(is, path)) : static_cast<T>(detail::get<double>(is, path));
    } else {
      throw std::runtime_error(path + ": unsupported scalar size " + std::to_string(sz));
    }
    const size_t slash = name.find('/');
    const std::string kind = name.substr(0, slash), key = name.substr(slash + 1);
    if (kind == "param") ck.params[key] = std::move(m);
    else if (kind == "adam_m") ck.adam_m[key] = std::move(m);
    else if (kind == "adam_v") ck.adam_v[key] = std::move(m);
    else throw std::runtime_error(path + ": unknown array kind " + kind);
  }
  return ck;
}

/// Copies checkpoint parameters into `store`. With `strict`, every store
/// parameter must be present; otherwise missing ones keep their values
/// (used when extending a base network). Returns the number copied.
template <typename T>
size_t apply_checkpoint(const Checkpoint<T>& ck, ParameterStore<T>& store, bool strict = true,
                        Adam<T>* adam = nullptr) {
  size_t copied = 0;
  auto& entries = store.entries();
  for (size_t i = 0; i < entries.size(); ++i) {
    auto& e = entries[i];
    auto it = ck.params.find(e.name);
    if (it == ck.params.end()) {
      if (strict) throw std::runtime_error("checkpoint is missing parameter " + e.name);
      continue;
    }
    if (it->second.rows() != e.var.rows() || it->second.cols() != e.var.cols())
      throw std::runtime_error("checkpoint shape mismatch for " + e.name);
    e.var.mutable_value() = it->second;
    ++copied;
    if (adam) {
      auto m = ck.adam_m.find(e.name), v = ck.adam_v.find(e.name);
      if (m != ck.adam_m.end()) adam->first_moments()[i] = m->second;
      if (v != ck.adam_v.end()) adam->second_moments()[i] = v->second;
    }
  }
  if (adam) adam->set_steps(ck.adam_steps);
  return copied;
}

}  // namespace seanet

#endif  // SEANET_TRAIN_CHECKPOINT_HPP_
