#include <algorithm>
#include <numeric>
#include <string>

#include "privagg/errors.hpp"
#include "privagg/harness.hpp"

namespace privagg {

Population generate_population(const PopulationSpec& spec, Rng& rng) {
  std::uint64_t assigned = 0;
  for (const auto& [value, count] : spec.counts) {
    assigned += count;
    if (assigned > spec.total) {
      throw SpecError("truthful counts exceed the population total of " +
                      std::to_string(spec.total));
    }
  }

  std::vector<std::optional<std::uint32_t>> values;
  values.reserve(spec.total);
  for (const auto& [value, count] : spec.counts) values.insert(values.end(), count, value);
  values.resize(spec.total);
  std::shuffle(values.begin(), values.end(), rng);

  Population out(spec.total);
  for (std::uint64_t i = 0; i < spec.total; ++i) out[i] = Owner{i, values[i]};
  return out;
}

std::map<std::uint32_t, std::uint64_t> true_counts(const Population& population) {
  std::map<std::uint32_t, std::uint64_t> out;
  for (const Owner& o : population) {
    if (o.value) ++out[*o.value];
  }
  return out;
}

}  // namespace privagg
