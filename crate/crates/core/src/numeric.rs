/// Neumaier-compensated summation.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Below this exponent `exp` underflows past the smallest subnormal.
pub const UNDERFLOW_EXPONENT: f64 = -745.0;

/// `exp(x)` with every exponent below -745 mapped to exactly zero.
#[inline]
pub fn exp_or_zero(x: f64) -> f64 {
    if x < UNDERFLOW_EXPONENT {
        0.0
    } else {
        x.exp()
    }
}
