#pragma once

// JSON task-set files:
//   {"kind": "fp"|"edf",
//    "tasks": [{"C": int, "T": int, "D": int, "J": int}, ...],
//    "meta": {"seed": int, "generator": string}}
// D defaults to T and J to 0. FP files list tasks by decreasing priority.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "schedkernel/demand.hpp"
#include "schedkernel/taskgen.hpp"

namespace schedkernel {

class TaskSetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TaskSetFile {
  Flavor kind = Flavor::kFp;
  std::vector<Task> tasks;
  std::optional<std::uint64_t> seed;
  std::string generator;

  TaskSystem system() const;
};

TaskSetFile parse_taskset(std::string_view text);
std::string serialize_taskset(const TaskSetFile& file);

TaskSetFile read_taskset(const std::filesystem::path& path);
void write_taskset(const std::filesystem::path& path, const TaskSetFile& file);

TaskSetFile to_taskset(const TaskSystem& system, Flavor kind);

}  // namespace schedkernel
