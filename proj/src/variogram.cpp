#include "geoboot/variogram.hpp"

#include <string>

#include "geoboot/error.hpp"

namespace geoboot {

namespace {

void check_ranges(const std::array<double, 3>& ranges,
                  const std::string& label) {
  for (double r : ranges) {
    if (!(r > 0.0)) {
      throw Error("variogram '" + label + "': all ranges must be > 0");
    }
  }
}

}  // namespace

void VariogramModel::validate() const {
  check_ranges(ranges, label);
  if (!(sill > 0.0)) {
    throw Error("variogram '" + label + "': sill must be > 0");
  }
  if (nugget < 0.0) {
    throw Error("variogram '" + label + "': nugget must be >= 0");
  }
}

void VariogramSpec::validate() const {
  check_ranges(ranges, label);
  if (sill && !(*sill > 0.0)) {
    throw Error("variogram '" + label + "': sill must be > 0");
  }
  if (nugget < 0.0) {
    throw Error("variogram '" + label + "': nugget must be >= 0");
  }
}

VariogramModel VariogramSpec::materialize(double data_variance) const {
  validate();
  VariogramModel model;
  model.ranges = ranges;
  model.nugget = nugget;
  model.label = label;
  if (sill) {
    model.sill = *sill;
  } else {
    // Degenerate (constant) data would give sill 0; any positive value works
    // there because the back-transform of a constant cdf is constant.
    model.sill = data_variance > 0.0 ? data_variance : 1.0;
  }
  model.validate();
  return model;
}

}  // namespace geoboot
