#pragma once

// Machine-readable run reports for the CLI: deterministic given the same
// inputs and seed.

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace cgu {

inline constexpr const char* kVersion = "0.1.0";

struct Verdict {
  std::string check;
  std::string status;  // "OK", "FAIL" or "NA"
  std::string witness;
};

class RunReport {
 public:
  RunReport(std::string command, std::uint64_t seed)
      : command_(std::move(command)), seed_(seed) {}

  void absorb_input(const std::string& bytes) {
    // FNV-1a over the concatenated canonical inputs
    for (unsigned char c : bytes) {
      digest_ ^= c;
      digest_ *= 0x100000001b3ULL;
    }
  }

  void add(const std::string& check, bool ok, const std::string& witness) {
    verdicts_.push_back({check, ok ? "OK" : "FAIL", witness});
  }
  void add_na(const std::string& check, const std::string& note) {
    verdicts_.push_back({check, "NA", note});
  }

  bool all_ok() const {
    for (const auto& v : verdicts_)
      if (v.status == "FAIL") return false;
    return true;
  }
  int exit_code() const { return all_ok() ? 0 : 1; }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command_;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(digest_));
    j["inputs_digest"] = std::string(buf);
    nlohmann::ordered_json vs = nlohmann::ordered_json::array();
    for (const auto& v : verdicts_) {
      nlohmann::ordered_json e;
      e["check"] = v.check;
      e["status"] = v.status;
      e["witness"] = v.witness;
      vs.push_back(e);
    }
    j["verdicts"] = vs;
    j["seed"] = seed_;
    j["versions"] = {{"cgu", kVersion}};
    return j;
  }

 private:
  std::string command_;
  std::uint64_t seed_;
  std::uint64_t digest_ = 0xcbf29ce484222325ULL;
  std::vector<Verdict> verdicts_;
};

}  // namespace cgu
