#include "auxst/task.h"

#include <algorithm>
#include <stdexcept>

namespace auxst {

std::string_view role_name(TaskRole role) {
  return role == TaskRole::Main ? "main" : "aux";
}

TaskRole parse_role(std::string_view text) {
  if (text == "main") return TaskRole::Main;
  if (text == "aux") return TaskRole::Auxiliary;
  throw std::invalid_argument("unknown task role '" + std::string(text) + "'");
}

TaskSpec::TaskSpec(std::string name, std::vector<std::string> tagset, TaskRole role)
    : name_(std::move(name)), tagset_(std::move(tagset)), role_(role) {
  if (name_.empty()) throw std::invalid_argument("task name is empty");
  if (tagset_.empty()) {
    throw std::invalid_argument("task '" + name_ + "' has an empty tagset");
  }
  for (std::size_t i = 0; i < tagset_.size(); ++i) {
    if (!index_.emplace(tagset_[i], i).second) {
      throw std::invalid_argument("task '" + name_ + "' lists label '" +
                                  tagset_[i] + "' twice");
    }
  }
}

std::optional<std::size_t> TaskSpec::index_of(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TaskSpec TaskSpec::with_labels(std::vector<std::string> extra) const {
  std::sort(extra.begin(), extra.end());
  extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
  std::vector<std::string> tags = tagset_;
  for (auto& label : extra) {
    if (!index_of(label)) tags.push_back(std::move(label));
  }
  return TaskSpec(name_, std::move(tags), role_);
}

}  // namespace auxst
