#include "schedkernel/taskset_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace schedkernel {

namespace {

using Json = nlohmann::ordered_json;

std::int64_t field(const Json& task, const char* key, std::size_t index) {
  const auto it = task.find(key);
  if (it == task.end()) {
    throw TaskSetError("task " + std::to_string(index + 1) + ": missing \"" +
                       key + "\"");
  }
  if (!it->is_number_integer()) {
    throw TaskSetError("task " + std::to_string(index + 1) + ": \"" + key +
                       "\" must be an integer");
  }
  return it->get<std::int64_t>();
}

}  // namespace

TaskSystem TaskSetFile::system() const {
  return kind == Flavor::kFp ? TaskSystem::fixed_priority(tasks)
                             : TaskSystem::edf(tasks);
}

TaskSetFile parse_taskset(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw TaskSetError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw TaskSetError("top level must be an object");

  TaskSetFile file;
  const auto kind = doc.find("kind");
  if (kind == doc.end() || !kind->is_string()) {
    throw TaskSetError("\"kind\" must be \"fp\" or \"edf\"");
  }
  if (*kind == "fp") {
    file.kind = Flavor::kFp;
  } else if (*kind == "edf") {
    file.kind = Flavor::kEdf;
  } else {
    throw TaskSetError("\"kind\" must be \"fp\" or \"edf\"");
  }

  const auto tasks = doc.find("tasks");
  if (tasks == doc.end() || !tasks->is_array()) {
    throw TaskSetError("\"tasks\" must be an array");
  }
  for (std::size_t i = 0; i < tasks->size(); ++i) {
    const Json& entry = (*tasks)[i];
    if (!entry.is_object()) {
      throw TaskSetError("task " + std::to_string(i + 1) +
                         " must be an object");
    }
    Task task;
    task.wcet = field(entry, "C", i);
    task.period = field(entry, "T", i);
    task.deadline = entry.contains("D") ? field(entry, "D", i) : task.period;
    task.jitter = entry.contains("J") ? field(entry, "J", i) : 0;
    try {
      validate(task);
    } catch (const std::invalid_argument& e) {
      throw TaskSetError("task " + std::to_string(i + 1) + ": " + e.what());
    }
    file.tasks.push_back(task);
  }

  if (const auto meta = doc.find("meta"); meta != doc.end()) {
    if (!meta->is_object()) throw TaskSetError("\"meta\" must be an object");
    if (const auto seed = meta->find("seed"); seed != meta->end()) {
      if (!seed->is_number_unsigned() && !seed->is_number_integer()) {
        throw TaskSetError("\"meta.seed\" must be an integer");
      }
      file.seed = seed->get<std::uint64_t>();
    }
    if (const auto gen = meta->find("generator"); gen != meta->end()) {
      if (!gen->is_string()) {
        throw TaskSetError("\"meta.generator\" must be a string");
      }
      file.generator = gen->get<std::string>();
    }
  }
  return file;
}

std::string serialize_taskset(const TaskSetFile& file) {
  Json doc;
  doc["kind"] = flavor_name(file.kind);
  Json tasks = Json::array();
  for (const Task& task : file.tasks) {
    tasks.push_back(Json{{"C", task.wcet},
                         {"T", task.period},
                         {"D", task.deadline},
                         {"J", task.jitter}});
  }
  doc["tasks"] = std::move(tasks);
  Json meta = Json::object();
  if (file.seed) meta["seed"] = *file.seed;
  if (!file.generator.empty()) meta["generator"] = file.generator;
  doc["meta"] = std::move(meta);
  return doc.dump(2) + "\n";
}

TaskSetFile read_taskset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TaskSetError("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_taskset(text.str());
  } catch (const TaskSetError& e) {
    throw TaskSetError(path.string() + ": " + e.what());
  }
}

void write_taskset(const std::filesystem::path& path, const TaskSetFile& file) {
  std::ofstream out(path);
  if (!out) throw TaskSetError("cannot write " + path.string());
  out << serialize_taskset(file);
  if (!out) throw TaskSetError("write failed: " + path.string());
}

TaskSetFile to_taskset(const TaskSystem& system, Flavor kind) {
  TaskSetFile file;
  file.kind = kind;
  file.tasks = system.tasks();
  return file;
}

}  // namespace schedkernel
