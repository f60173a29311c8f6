#pragma once

#include <map>
#include <string>
#include <vector>

#include "taftwin/core/types.hpp"

namespace taftwin::cosim {

class OwnershipViolation : public Error {
 public:
  using Error::Error;
};

class StaleUpdate : public Error {
 public:
  using Error::Error;
};

// Maps participant ids to the client that drives them. Ids absent from the table belong to
// the kernel, so every id has exactly one owner.
class OwnershipTable {
 public:
  static constexpr const char* kKernel = "";

  const std::string& owner(ParticipantId id) const {
    static const std::string kernel;
    auto it = owners_.find(id);
    return it == owners_.end() ? kernel : it->second;
  }
  bool owned_by_kernel(ParticipantId id) const { return !owners_.count(id); }
  bool owned_by(ParticipantId id, const std::string& client) const {
    auto it = owners_.find(id);
    return it != owners_.end() && it->second == client;
  }

  // Claims succeed only for kernel-owned ids; claim-based, never last-writer-wins.
  bool claim(ParticipantId id, const std::string& client) {
    if (client.empty()) throw PreconditionError("client id must be non-empty");
    auto [it, inserted] = owners_.emplace(id, client);
    return inserted || it->second == client;
  }

  void release(ParticipantId id) { owners_.erase(id); }

  std::vector<ParticipantId> release_all(const std::string& client) {
    std::vector<ParticipantId> out;
    for (auto it = owners_.begin(); it != owners_.end();) {
      if (it->second == client) {
        out.push_back(it->first);
        it = owners_.erase(it);
      } else {
        ++it;
      }
    }
    return out;
  }

  std::vector<ParticipantId> owned_ids(const std::string& client) const {
    std::vector<ParticipantId> out;
    for (const auto& [id, c] : owners_) {
      if (c == client) out.push_back(id);
    }
    return out;
  }

  std::size_t size() const { return owners_.size(); }

 private:
  std::map<ParticipantId, std::string> owners_;
};

}  // namespace taftwin::cosim
