//! Wrap-around arithmetic on `[0, 1)`.

/// Reduces `x` into `[0, 1)`.
///
/// `x - floor(x)` can round up to exactly 1.0 for tiny negative inputs; that
/// case is folded back to 0.
#[inline]
pub fn wrap(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Intrinsic distance on the circle of circumference 1.
#[inline]
pub fn torus_dist(a: f64, b: f64) -> f64 {
    let d = wrap(a - b);
    d.min(1.0 - d)
}

/// Parses a coordinate literal: a decimal (`0.25`, `1e-3`) or an exact
/// rational `p/q`, rounded to the nearest double.
pub fn parse_coordinate(literal: &str) -> Option<f64> {
    let s = literal.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num.trim().parse().ok()?;
        let den: i64 = den.trim().parse().ok()?;
        if den == 0 || num.unsigned_abs() >= 1 << 53 || den.unsigned_abs() >= 1 << 53 {
            return None;
        }
        // Both operands are exact doubles, so the quotient is correctly rounded.
        Some(num as f64 / den as f64)
    } else {
        let v: f64 = s.parse().ok()?;
        v.is_finite().then_some(v)
    }
}
