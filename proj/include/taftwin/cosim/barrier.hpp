#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <set>
#include <string>
#include <vector>

namespace taftwin::cosim {

// Per-frame rendezvous between the tick task and connection readers. Waiting never fails:
// after the timeout the caller proceeds with whoever answered.
class FrameBarrier {
 public:
  void begin(std::uint64_t frame_no, const std::vector<std::string>& expected) {
    std::lock_guard lock(mu_);
    frame_no_ = frame_no;
    expected_ = {expected.begin(), expected.end()};
    responded_.clear();
    armed_ = true;
  }

  // Called by readers; answers for any other frame are ignored.
  void respond(const std::string& who, std::uint64_t frame_no) {
    {
      std::lock_guard lock(mu_);
      if (!armed_ || frame_no != frame_no_ || !expected_.count(who)) return;
      responded_.insert(who);
    }
    cv_.notify_all();
  }

  // A disconnected participant stops being waited for.
  void withdraw(const std::string& who) {
    {
      std::lock_guard lock(mu_);
      expected_.erase(who);
    }
    cv_.notify_all();
  }

  std::set<std::string> wait(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, timeout, [&] {
      for (const auto& e : expected_) {
        if (!responded_.count(e)) return false;
      }
      return true;
    });
    armed_ = false;
    return responded_;
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::uint64_t frame_no_ = 0;
  std::set<std::string> expected_;
  std::set<std::string> responded_;
  bool armed_ = false;
};

}  // namespace taftwin::cosim
