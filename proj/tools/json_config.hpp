#pragma once

#include <istream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

namespace simconf::cli {

// JSON config files mirroring the flags: top-level keys are option names
// (without dashes), nested objects are subcommand sections, arrays feed
// multi-value options.
//
//   {"run": {"method": "clf-pairs", "fraction": 0.5, "jobs": 4}}
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool,
                        std::string) const override {
    nlohmann::ordered_json j = to_json(app, default_also);
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConfigError(std::string("invalid JSON config: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static std::string scalar_to_string(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void collect(const nlohmann::json& j,
                      const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    if (!j.is_object())
      throw CLI::ConfigError("JSON config must be an object");
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto nested = parents;
        nested.push_back(key);
        collect(value, nested, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar_to_string(v));
      } else {
        item.inputs.push_back(scalar_to_string(value));
      }
      items.push_back(std::move(item));
    }
  }

  static nlohmann::ordered_json to_json(const CLI::App* app,
                                        bool default_also) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const CLI::Option* opt : app->get_options({})) {
      if (!opt->get_configurable() || opt->get_lnames().empty()) continue;
      const std::string name = opt->get_lnames()[0];
      if (opt->count() > 0) {
        const auto results = opt->results();
        if (results.size() == 1)
          j[name] = results[0];
        else
          j[name] = results;
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
      nlohmann::ordered_json nested = to_json(sub, default_also);
      if (!nested.empty()) j[sub->get_name()] = std::move(nested);
    }
    return j;
  }
};

}  // namespace simconf::cli
