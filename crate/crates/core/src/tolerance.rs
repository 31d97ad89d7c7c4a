//! Relative-tolerance comparisons. Only validators and certificates use these;
//! constructions branch on exact comparisons.

pub const REL_TOL: f64 = 1e-9;

/// `a <= b` up to a relative slack of `REL_TOL` of the larger magnitude.
pub fn le_rel(a: f64, b: f64) -> bool {
    le_with(a, b, REL_TOL)
}

pub fn le_with(a: f64, b: f64, rel: f64) -> bool {
    a <= b || a - b <= rel * a.abs().max(b.abs())
}

pub fn eq_rel(a: f64, b: f64) -> bool {
    le_rel(a, b) && le_rel(b, a)
}

/// `num / den`, with `0 / 0 = 0` and `x / 0 = inf` for `x > 0`.
pub fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}
