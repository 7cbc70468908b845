//! Angles on the canonical interval `[0, 2π)` and circular distances.
//!
//! Directions are plain `f64` radians; every function here returns values
//! already wrapped to `[0, 2π)`. The angle of a point `(z1, z2)` is measured
//! counterclockwise from the positive first axis, so `(1, 0) ↦ 0`,
//! `(0, 1) ↦ π/2` and `(-1, -1) ↦ 5π/4`.

use crate::error::{Error, Result};
use std::f64::consts::{PI, TAU};

/// Wrap an angle in radians to `[0, 2π)`.
///
/// Handles negative and arbitrarily large inputs; the result is always
/// strictly below 2π (a tiny negative input can round to 2π under
/// `rem_euclid`, which we fold back to 0).
pub fn wrap(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Angle of the vector with cosine component `c` and sine component `s`,
/// wrapped to `[0, 2π)`. Errors on the zero vector, whose direction is
/// undefined.
pub fn atan2_wrapped(c: f64, s: f64) -> Result<f64> {
    if c == 0.0 && s == 0.0 {
        return Err(Error::invalid("direction of the zero vector is undefined"));
    }
    if !c.is_finite() || !s.is_finite() {
        return Err(Error::invalid(format!(
            "direction of non-finite vector ({c}, {s}) is undefined"
        )));
    }
    Ok(wrap(s.atan2(c)))
}

/// Shortest arc length between two angles; symmetric, in `[0, π]`.
pub fn arc_distance(a: f64, b: f64) -> f64 {
    let d = (wrap(a) - wrap(b)).abs();
    PI - (PI - d).abs()
}
