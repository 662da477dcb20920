#pragma once

#include <Eigen/Core>

namespace latincut {

/// Isotropic linear elastic material under plane strain.
struct Material {
  double E = 1.0;
  double nu = 0.3;

  double lambda() const { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }
  double mu() const { return E / (2.0 * (1.0 + nu)); }

  /// Voigt matrix mapping (exx, eyy, 2exy) to (sxx, syy, sxy).
  Eigen::Matrix3d hooke() const {
    const double l = lambda(), m = mu();
    Eigen::Matrix3d d;
    d << l + 2.0 * m, l, 0.0,
         l, l + 2.0 * m, 0.0,
         0.0, 0.0, m;
    return d;
  }

  /// Throws Validation unless E > 0 and nu in (0, 0.5).
  void validate() const;

  friend bool operator==(const Material&, const Material&) = default;
};

}  // namespace latincut
