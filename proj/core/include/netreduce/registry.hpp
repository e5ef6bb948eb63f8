#pragma once

#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "netreduce/error.hpp"

namespace netreduce {

/// Name-keyed strategy table shared by loaders, partitioners, reducers,
/// transforms and profiles. Lookups take a shared lock, registration an
/// exclusive one. Names are case-sensitive.
template <typename Entry>
class Registry {
 public:
  explicit Registry(std::string what) : what_(std::move(what)) {}

  void add(const std::string& name, Entry entry) {
    std::unique_lock lock(mutex_);
    if (entries_.contains(name)) {
      throw Error(ErrorCode::DuplicateStrategyName,
                  what_ + " '" + name + "' is already registered");
    }
    entries_.emplace(name, std::move(entry));
  }

  Entry get(const std::string& name) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(name);
    if (it == entries_.end()) {
      throw Error(ErrorCode::UnknownStrategy,
                  "unknown " + what_ + " '" + name + "'");
    }
    return it->second;
  }

  bool contains(const std::string& name) const {
    std::shared_lock lock(mutex_);
    return entries_.contains(name);
  }

  std::vector<std::string> names() const {
    std::shared_lock lock(mutex_);
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [name, _] : entries_) out.push_back(name);
    return out;
  }

 private:
  std::string what_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, Entry> entries_;
};

}  // namespace netreduce
