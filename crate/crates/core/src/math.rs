//! Scalar helpers shared by the field, dynamics and closed-form code.

/// Signum with `sgn(0) = 0`.
///
/// Coincident positions are the constant-amplitude branch of the two-peakon
/// reduction and the centre of a stationary kink; both rely on this value.
#[inline]
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Integer power by repeated multiplication. Exact in sign for negative bases.
#[inline]
pub fn ipow(base: f64, exp: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// `(-1)^n`.
#[inline]
pub fn neg_one_pow(n: u32) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// The kink profile `sgn(y) (e^{-|y|} - 1)`.
#[inline]
pub fn kink_shape(y: f64) -> f64 {
    sgn(y) * ((-y.abs()).exp() - 1.0)
}

/// Real `b`-th root; odd `b` accepts negative arguments.
pub fn real_root(value: f64, b: u32) -> Option<f64> {
    if b == 1 {
        return Some(value);
    }
    if value >= 0.0 {
        Some(value.powf(1.0 / f64::from(b)))
    } else if b % 2 == 1 {
        Some(-(-value).powf(1.0 / f64::from(b)))
    } else {
        None
    }
}
