#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cfx/dataset.h"
#include "cfx/model.h"

namespace cfx::testing {

inline std::string DataPath(const std::string& name) {
  return std::string(CFX_TEST_DATA_DIR) + "/" + name;
}

inline const Dataset& Drug() {
  static const Dataset data = LoadCsv(DataPath("drug200_replica.csv"), "Drug");
  return data;
}

inline const Dataset& Car() {
  static const Dataset data = LoadCsv(DataPath("car_replica.csv"), "class");
  return data;
}

inline const MlpModel& DrugModel() {
  static const MlpModel model = TrainMlp(Drug(), {.seed = 7});
  return model;
}

inline const MlpModel& CarModel() {
  static const MlpModel model = TrainMlp(Car(), {.seed = 7});
  return model;
}

// Raw text cells of one column, read without the library's CSV loader.
inline std::vector<std::string> RawColumn(const std::string& path,
                                          const std::string& column) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  std::size_t index = 0;
  while (index < header.size() && header[index] != column) ++index;
  std::vector<std::string> out;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    for (std::size_t c = 0; std::getline(ss, cell, ','); ++c) {
      if (c == index) out.push_back(cell);
    }
  }
  return out;
}

// Parses a CSV held in a string.
inline Dataset FromText(const std::string& text, const std::string& target,
                        const LoadOptions& options = {}) {
  std::istringstream in(text);
  return ParseCsv(in, target, options);
}

}  // namespace cfx::testing
