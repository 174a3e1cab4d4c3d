#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace auxst {

enum class TaskRole { Main, Auxiliary };

std::string_view role_name(TaskRole role);
TaskRole parse_role(std::string_view text);

// A named task with a closed, ordered tagset. Label <-> index is a bijection.
class TaskSpec {
 public:
  TaskSpec(std::string name, std::vector<std::string> tagset, TaskRole role);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& tagset() const { return tagset_; }
  TaskRole role() const { return role_; }
  std::size_t size() const { return tagset_.size(); }

  std::optional<std::size_t> index_of(std::string_view label) const;
  const std::string& label(std::size_t index) const { return tagset_.at(index); }

  // Copy with extra labels appended (sorted, skipping known ones).
  TaskSpec with_labels(std::vector<std::string> extra) const;

  bool operator==(const TaskSpec& other) const {
    return name_ == other.name_ && tagset_ == other.tagset_ && role_ == other.role_;
  }

 private:
  std::string name_;
  std::vector<std::string> tagset_;
  TaskRole role_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace auxst
